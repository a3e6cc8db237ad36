#include "mgk/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mgk/error.hpp"
#include "mgk/parallel.hpp"
#include "mgk/stats.hpp"

namespace mgk::detect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSplitStream = 0x53504C4954ULL;  // "SPLIT"

std::size_t idx(Label l) { return static_cast<std::size_t>(l); }

using Counts = std::array<std::size_t, kLabelCount>;

std::vector<LabeledSample> sorted_copy(std::span<const LabeledSample> samples) {
    std::vector<LabeledSample> s(samples.begin(), samples.end());
    std::stable_sort(s.begin(), s.end(), [](const LabeledSample& a, const LabeledSample& b) {
        return a.feature < b.feature;
    });
    return s;
}

std::vector<Label> present_labels(std::span<const LabeledSample> samples) {
    Counts c{};
    for (const auto& s : samples) ++c[idx(s.label)];
    std::vector<Label> out;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (c[i] > 0) out.push_back(static_cast<Label>(i));
    }
    return out;
}

// ---- MaxMargin -------------------------------------------------------------

// Cut between two classes: x < cut predicts `lower`. Returns -inf/+inf when
// predicting a single class for the pair is best.
double pair_cut(const std::vector<LabeledSample>& sorted, Label lower, Label upper) {
    std::vector<LabeledSample> pair;
    for (const auto& s : sorted) {
        if (s.label == lower || s.label == upper) pair.push_back(s);
    }
    std::size_t lower_total = 0;
    for (const auto& s : pair) lower_total += s.label == lower;

    // errors(cut) = lowers at or above the cut + uppers below it.
    double best_cut = -kInf;
    std::size_t best_errors = lower_total;
    std::size_t lowers_below = 0;
    std::size_t uppers_below = 0;
    std::size_t i = 0;
    while (i < pair.size()) {
        const double v = pair[i].feature;
        for (; i < pair.size() && pair[i].feature == v; ++i) {
            (pair[i].label == lower ? lowers_below : uppers_below) += 1;
        }
        const double cut = i < pair.size() ? 0.5 * (v + pair[i].feature) : kInf;
        const std::size_t errors = (lower_total - lowers_below) + uppers_below;
        if (errors < best_errors) {
            best_errors = errors;
            best_cut = cut;
        }
    }
    return best_cut;
}

ThresholdModel train_max_margin(std::span<const LabeledSample> samples) {
    const auto sorted = sorted_copy(samples);
    std::vector<Label> classes = present_labels(samples);
    std::array<double, kLabelCount> sum{};
    Counts n{};
    for (const auto& s : samples) {
        sum[idx(s.label)] += s.feature;
        ++n[idx(s.label)];
    }
    std::stable_sort(classes.begin(), classes.end(), [&](Label a, Label b) {
        return sum[idx(a)] / static_cast<double>(n[idx(a)]) <
               sum[idx(b)] / static_cast<double>(n[idx(b)]);
    });

    // One-vs-one: every pair votes, the lower-mean class below its cut. Ties
    // go to the class with the lower mean.
    struct PairCut {
        std::size_t lower;
        std::size_t upper;
        double cut;
    };
    std::vector<PairCut> pairs;
    std::vector<double> points;
    for (std::size_t a = 0; a < classes.size(); ++a) {
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            const double c = pair_cut(sorted, classes[a], classes[b]);
            pairs.push_back({a, b, c});
            if (std::isfinite(c)) points.push_back(c);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    const auto vote = [&](auto below) {
        std::array<int, kLabelCount> votes{};
        for (const auto& p : pairs) ++votes[below(p.cut) ? p.lower : p.upper];
        std::size_t best = 0;
        for (std::size_t c = 1; c < classes.size(); ++c) {
            if (votes[c] > votes[best]) best = c;
        }
        return classes[best];
    };

    ThresholdModel model;
    model.trainer = Trainer::MaxMargin;
    // Interval i is [points[i-1], points[i]); x < cut holds there iff cut >= points[i].
    for (std::size_t i = 0; i <= points.size(); ++i) {
        const Label l = i < points.size()
                            ? vote([&](double c) { return c >= points[i]; })
                            : vote([](double c) { return c == kInf; });
        if (model.labels.empty()) {
            model.labels.push_back(l);
        } else if (model.labels.back() != l) {
            model.boundaries.push_back(points[i - 1]);
            model.labels.push_back(l);
        }
    }
    return model;
}

// ---- Gaussian naive Bayes ----------------------------------------------------

struct Gaussian {
    Label label;
    double mean;
    double var;
    double log_prior;

    double log_posterior(double x) const {
        const double d = x - mean;
        return log_prior - 0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
    }
};

// Roots of a x^2 + b x + c = 0.
std::vector<double> real_roots(double a, double b, double c) {
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> r;
    if (q != 0.0) {
        r.push_back(q / a);
        r.push_back(c / q);
    } else {
        r.push_back(0.0);
    }
    return r;
}

ThresholdModel train_gaussian_nb(std::span<const LabeledSample> samples) {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& s : samples) {
        lo = std::min(lo, s.feature);
        hi = std::max(hi, s.feature);
    }
    const double range = hi - lo;
    const double floor = range > 0.0 ? 1e-9 * range * range : 1e-9;

    std::array<stats::RunningMoments, kLabelCount> acc;
    for (const auto& s : samples) acc[idx(s.label)].push(s.feature);
    std::vector<Gaussian> classes;
    const double total = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (acc[i].count() == 0) continue;
        const double n = static_cast<double>(acc[i].count());
        const double var = std::max(acc[i].m2() / n, floor);
        classes.push_back({static_cast<Label>(i), acc[i].mean(), var, std::log(n / total)});
    }

    const auto argmax = [&](double x) {
        std::size_t best = 0;
        double best_lp = classes[0].log_posterior(x);
        for (std::size_t c = 1; c < classes.size(); ++c) {
            const double lp = classes[c].log_posterior(x);
            if (lp > best_lp) {
                best_lp = lp;
                best = c;
            }
        }
        return classes[best].label;
    };

    std::vector<double> roots;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = i + 1; j < classes.size(); ++j) {
            const Gaussian& p = classes[i];
            const Gaussian& q = classes[j];
            const double a = -0.5 / p.var + 0.5 / q.var;
            const double b = p.mean / p.var - q.mean / q.var;
            const double c = -0.5 * p.mean * p.mean / p.var + 0.5 * q.mean * q.mean / q.var +
                             p.log_prior - q.log_prior - 0.5 * std::log(p.var / q.var);
            for (double r : real_roots(a, b, c)) {
                if (r > lo && r < hi) roots.push_back(r);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

    ThresholdModel model;
    model.trainer = Trainer::GaussianNB;
    std::vector<double> edges;
    edges.push_back(lo);
    edges.insert(edges.end(), roots.begin(), roots.end());
    edges.push_back(hi);
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const Label l = argmax(0.5 * (edges[s] + edges[s + 1]));
        if (model.labels.empty()) {
            model.labels.push_back(l);
        } else if (model.labels.back() != l) {
            model.boundaries.push_back(edges[s]);
            model.labels.push_back(l);
        }
    }
    return model;
}

// ---- Gini stump --------------------------------------------------------------

double gini_weighted(const Counts& c) {
    const double n = static_cast<double>(c[0] + c[1] + c[2]);
    if (n == 0.0) return 0.0;
    double sq = 0.0;
    for (std::size_t x : c) sq += static_cast<double>(x) * static_cast<double>(x);
    return n - sq / n;  // n * gini
}

struct Leaf {
    std::size_t begin;
    std::size_t end;
};

struct SplitChoice {
    double gain = 0.0;
    std::size_t at = 0;  ///< first index of the right child
};

SplitChoice best_split(const std::vector<LabeledSample>& sorted, const Leaf& leaf) {
    Counts total{};
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) ++total[idx(sorted[i].label)];
    const double parent = gini_weighted(total);
    SplitChoice best;
    Counts left{};
    for (std::size_t i = leaf.begin + 1; i < leaf.end; ++i) {
        ++left[idx(sorted[i - 1].label)];
        if (!(sorted[i - 1].feature < sorted[i].feature)) continue;
        Counts right{};
        for (std::size_t c = 0; c < kLabelCount; ++c) right[c] = total[c] - left[c];
        const double gain = parent - gini_weighted(left) - gini_weighted(right);
        if (gain > best.gain + 1e-12 * std::max(1.0, parent)) {
            best.gain = gain;
            best.at = i;
        }
    }
    return best;
}

Label majority(const std::vector<LabeledSample>& sorted, const Leaf& leaf) {
    Counts c{};
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) ++c[idx(sorted[i].label)];
    std::size_t best = 0;
    for (std::size_t k = 1; k < kLabelCount; ++k) {
        if (c[k] > c[best]) best = k;
    }
    return static_cast<Label>(best);
}

ThresholdModel train_stump(std::span<const LabeledSample> samples) {
    const auto sorted = sorted_copy(samples);
    const std::size_t classes = present_labels(samples).size();
    std::vector<Leaf> leaves{{0, sorted.size()}};
    while (leaves.size() < classes) {
        std::size_t which = leaves.size();
        SplitChoice choice;
        for (std::size_t l = 0; l < leaves.size(); ++l) {
            const SplitChoice s = best_split(sorted, leaves[l]);
            if (s.gain > choice.gain) {
                choice = s;
                which = l;
            }
        }
        if (which == leaves.size()) break;
        const Leaf parent = leaves[which];
        leaves[which] = {parent.begin, choice.at};
        leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(which) + 1,
                      Leaf{choice.at, parent.end});
    }

    ThresholdModel model;
    model.trainer = Trainer::Stump;
    for (const Leaf& leaf : leaves) {
        const Label l = majority(sorted, leaf);
        if (model.labels.empty()) {
            model.labels.push_back(l);
        } else if (model.labels.back() != l) {
            model.boundaries.push_back(
                0.5 * (sorted[leaf.begin - 1].feature + sorted[leaf.begin].feature));
            model.labels.push_back(l);
        }
    }
    return model;
}

}  // namespace

const char* to_string(Label l) {
    switch (l) {
        case Label::ShortClean: return "short_clean";
        case Label::ShortImpaired: return "short_impaired";
        case Label::Long: return "long";
    }
    return "?";
}

const char* to_string(Trainer t) {
    switch (t) {
        case Trainer::MaxMargin: return "max_margin";
        case Trainer::GaussianNB: return "gaussian_nb";
        case Trainer::Stump: return "stump";
    }
    return "?";
}

std::vector<LabeledSample> build_dataset(std::span<const sim::JobRecord> jobs, Feature feature,
                                         Scope scope) {
    std::vector<LabeledSample> out;
    out.reserve(jobs.size());
    for (const auto& j : jobs) {
        if (j.warmup) continue;
        const bool is_long = j.job_class == sim::JobClass::Long;
        if (is_long && scope == Scope::ShortOnly) continue;
        LabeledSample s;
        s.feature = feature == Feature::ResponseTime ? j.wait + j.service : j.wait;
        s.label = is_long ? Label::Long : (j.impaired ? Label::ShortImpaired : Label::ShortClean);
        out.push_back(s);
    }
    return out;
}

std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split(
    std::span<const LabeledSample> samples, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("test_fraction", "must lie in (0, 1)");
    }
    const std::size_t n = samples.size();
    if (n < 2) throw ValidationError("samples", "need at least 2 samples to split");
    std::size_t n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    stats::RngStream rng(seed, kSplitStream);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.bounded(i + 1)]);
    }
    std::vector<LabeledSample> train_set;
    std::vector<LabeledSample> test_set;
    test_set.reserve(n_test);
    train_set.reserve(n - n_test);
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_test ? test_set : train_set).push_back(samples[order[i]]);
    }
    return {std::move(train_set), std::move(test_set)};
}

Label ThresholdModel::predict(double feature) const {
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), feature);
    return labels[static_cast<std::size_t>(it - boundaries.begin())];
}

ThresholdModel train(std::span<const LabeledSample> samples, Trainer trainer) {
    if (samples.empty()) throw ValidationError("samples", "training needs at least one sample");
    for (const auto& s : samples) {
        if (!std::isfinite(s.feature)) throw ValidationError("samples", "features must be finite");
    }
    switch (trainer) {
        case Trainer::MaxMargin: return train_max_margin(samples);
        case Trainer::GaussianNB: return train_gaussian_nb(samples);
        case Trainer::Stump: return train_stump(samples);
    }
    throw ValidationError("trainer", "unknown trainer");
}

EvalReport evaluate(const ThresholdModel& model, std::span<const LabeledSample> test) {
    if (test.empty()) throw ValidationError("test", "evaluation needs at least one sample");
    EvalReport r;
    std::size_t correct = 0;
    for (const auto& s : test) {
        const Label p = model.predict(s.feature);
        ++r.confusion[idx(s.label)][idx(p)];
        correct += p == s.label;
    }
    r.n_test = test.size();
    r.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return r;
}

std::optional<double> impaired_fraction(std::span<const sim::JobRecord> jobs) {
    std::size_t shorts = 0;
    std::size_t impaired = 0;
    for (const auto& j : jobs) {
        if (j.warmup || j.job_class != sim::JobClass::Short) continue;
        ++shorts;
        impaired += j.impaired;
    }
    if (shorts == 0) return std::nullopt;
    return static_cast<double>(impaired) / static_cast<double>(shorts);
}

TTestResult welch_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2) throw ValidationError("a", "Welch test needs at least 2 points per sample");
    if (b.size() < 2) throw ValidationError("b", "Welch test needs at least 2 points per sample");
    stats::RunningMoments ma;
    stats::RunningMoments mb;
    for (double x : a) ma.push(x);
    for (double x : b) mb.push(x);

    TTestResult r;
    r.n_a = a.size();
    r.n_b = b.size();
    r.mean_a = ma.mean();
    r.mean_b = mb.mean();
    const double na = static_cast<double>(r.n_a);
    const double nb = static_cast<double>(r.n_b);
    const double sa = ma.variance() / na;
    const double sb = mb.variance() / nb;
    const double se2 = sa + sb;
    const double diff = r.mean_a - r.mean_b;
    if (se2 == 0.0) {
        r.dof = na + nb - 2.0;
        r.t_stat = diff == 0.0 ? 0.0 : std::copysign(kInf, diff);
        r.p_value = diff == 0.0 ? 1.0 : std::numeric_limits<double>::min();
        return r;
    }
    r.t_stat = diff / std::sqrt(se2);
    r.dof = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    r.p_value = std::max(stats::student_t_sf(r.t_stat, r.dof), std::numeric_limits<double>::min());
    return r;
}

ThresholdAnalysis threshold_analysis(std::span<const sim::JobRecord> jobs, Trainer trainer,
                                     Feature feature) {
    ThresholdAnalysis out;
    const auto data = build_dataset(jobs, feature, Scope::ShortOnly);
    out.n = data.size();
    if (data.empty()) return out;

    std::vector<double> clean;
    std::vector<double> impaired;
    for (const auto& j : jobs) {
        if (j.warmup || j.job_class != sim::JobClass::Short) continue;
        (j.impaired ? impaired : clean).push_back(j.wait);
    }
    out.short_clean_prior = static_cast<double>(clean.size()) / static_cast<double>(data.size());
    const auto mean_of = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty()) return std::nullopt;
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out.mean_wait_clean = mean_of(clean);
    out.mean_wait_impaired = mean_of(impaired);
    if (clean.size() >= 2 && impaired.size() >= 2) out.ttest = welch_test(impaired, clean);

    out.model = train(data, trainer);
    if (!out.model.boundaries.empty()) out.threshold = out.model.boundaries.front();
    out.accuracy = evaluate(out.model, data).accuracy;
    return out;
}

KPoint evaluate_k(const WorkloadSpec& spec, int k, const SweepOptions& opts) {
    auto jobs = sim::simulate(spec, k, opts.n_samples, opts.seed, opts.warmup_fraction);
    sim::label_impaired(jobs);

    KPoint p;
    p.k = k;
    p.impaired_fraction = impaired_fraction(jobs);
    if (p.impaired_fraction) p.short_clean_prior = 1.0 - *p.impaired_fraction;

    const auto data = build_dataset(jobs, opts.feature, Scope::AllJobs);
    auto [train_set, test_set] = split(data, opts.test_fraction, opts.seed);
    const ThresholdModel model = train(train_set, opts.trainer);
    p.report = evaluate(model, test_set);
    p.report.n_train = train_set.size();
    p.report.k = k;
    p.report.seed = opts.seed;

    std::vector<double> clean;
    std::vector<double> impaired;
    for (const auto& j : jobs) {
        if (j.warmup || j.job_class != sim::JobClass::Short) continue;
        (j.impaired ? impaired : clean).push_back(j.wait);
    }
    if (clean.size() >= 2 && impaired.size() >= 2) {
        p.p_value = welch_test(impaired, clean).p_value;
    }
    if (opts.threshold) {
        p.threshold = threshold_analysis(jobs, opts.threshold_trainer, opts.threshold_feature);
    }
    return p;
}

std::vector<KPoint> accuracy_vs_k(const WorkloadSpec& spec, int k_from, int k_to,
                                  const SweepOptions& opts) {
    if (k_from < 1 || k_to < k_from) {
        throw ValidationError("k_range", "need 1 <= k_from <= k_to");
    }
    std::vector<KPoint> out(static_cast<std::size_t>(k_to - k_from + 1));
    parallel_for(out.size(), [&](std::size_t i) {
        out[i] = evaluate_k(spec, k_from + static_cast<int>(i), opts);
    });
    return out;
}

}  // namespace mgk::detect
