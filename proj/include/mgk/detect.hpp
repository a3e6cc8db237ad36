#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mgk/sim.hpp"
#include "mgk/workload.hpp"

namespace mgk::detect {

enum class Label : std::uint8_t { ShortClean = 0, ShortImpaired = 1, Long = 2 };
inline constexpr std::size_t kLabelCount = 3;

const char* to_string(Label l);

struct LabeledSample {
    double feature = 0.0;  ///< ms
    Label label = Label::ShortClean;
};

enum class Feature { ResponseTime, WaitingTime };
enum class Scope { AllJobs, ShortOnly };

/// One sample per non-warm-up record. Records must already carry impaired
/// flags (sim::label_impaired). ShortOnly drops Long records.
std::vector<LabeledSample> build_dataset(std::span<const sim::JobRecord> jobs, Feature feature,
                                         Scope scope);

/// Uniform random split without replacement (not stratified). The test set
/// has round(n * test_fraction) samples, clamped to [1, n - 1].
std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split(
    std::span<const LabeledSample> samples, double test_fraction, std::uint64_t seed);

enum class Trainer { MaxMargin, GaussianNB, Stump };

const char* to_string(Trainer t);

/// Piecewise-constant classifier on one feature. Interval i is
/// [boundaries[i-1], boundaries[i]) with the outer intervals unbounded, and
/// predicts labels[i].
struct ThresholdModel {
    std::vector<double> boundaries;  ///< strictly ascending
    std::vector<Label> labels;       ///< boundaries.size() + 1 entries
    Trainer trainer = Trainer::MaxMargin;

    Label predict(double feature) const;
};

/// Fits a threshold model.
///
/// MaxMargin: every class pair gets the midpoint of the gap between them
/// when separable, otherwise the candidate cut minimizing that pair's
/// training errors (smallest cut on ties), with the lower-mean class below
/// the cut. Pairs vote one-vs-one; ties go to the lower-mean class. This is
/// the decision geometry of a multi-class max-margin classifier on one
/// feature.
///
/// GaussianNB: per-class Gaussian likelihoods and empirical priors; cuts at
/// the posterior crossings inside the training range. Variances are floored
/// at 1e-9 * (feature range)^2.
///
/// Stump: Gini-impurity splits at midpoints of consecutive distinct values,
/// applied best-first until there are as many leaves as classes present.
///
/// Classes absent from the training data are never predicted.
ThresholdModel train(std::span<const LabeledSample> samples, Trainer trainer);

struct EvalReport {
    double accuracy = 0.0;
    /// confusion[true][predicted], indexed by Label.
    std::array<std::array<std::size_t, kLabelCount>, kLabelCount> confusion{};
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    int k = 0;
    std::uint64_t seed = 0;
};

EvalReport evaluate(const ThresholdModel& model, std::span<const LabeledSample> test);

/// Impaired shorts over all shorts, ignoring warm-up records. Empty when
/// there are no short jobs.
std::optional<double> impaired_fraction(std::span<const sim::JobRecord> jobs);

struct TTestResult {
    double t_stat = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

/// Two-sided Welch (unequal variance) t-test of equal means. Both samples
/// need at least 2 points. p_value is floored at the smallest normal double
/// so it stays in (0, 1].
TTestResult welch_test(std::span<const double> a, std::span<const double> b);

/// Threshold between clean and impaired short jobs on `feature` (waiting
/// time by default), trained on the whole trace (no split), plus the Welch
/// test on waiting times between the two groups.
struct ThresholdAnalysis {
    std::optional<double> threshold;  ///< first boundary of the trained model
    double accuracy = 0.0;            ///< on the training data
    std::size_t n = 0;
    std::optional<double> short_clean_prior;
    std::optional<double> mean_wait_clean;
    std::optional<double> mean_wait_impaired;
    std::optional<TTestResult> ttest;  ///< empty when a group has < 2 jobs
    ThresholdModel model;
};

ThresholdAnalysis threshold_analysis(std::span<const sim::JobRecord> jobs, Trainer trainer,
                                     Feature feature = Feature::WaitingTime);

struct SweepOptions {
    std::size_t n_samples = 50'000;
    double test_fraction = 0.2;
    Trainer trainer = Trainer::MaxMargin;
    Feature feature = Feature::ResponseTime;
    std::uint64_t seed = 1;
    double warmup_fraction = sim::kDefaultWarmupFraction;
    /// Also run the waiting-time threshold analysis per k.
    bool threshold = false;
    Trainer threshold_trainer = Trainer::GaussianNB;
    Feature threshold_feature = Feature::WaitingTime;
};

struct KPoint {
    int k = 1;
    EvalReport report;
    std::optional<double> impaired_fraction;
    std::optional<double> short_clean_prior;
    std::optional<ThresholdAnalysis> threshold;
    std::optional<double> p_value;  ///< Welch, waiting times impaired vs clean shorts
};

/// Per k in [k_from, k_to]: simulate n_samples jobs (seed and stream 0 for
/// every k), label, build the three-class dataset, split, train, evaluate.
/// Ks run in parallel; output is in ascending k.
std::vector<KPoint> accuracy_vs_k(const WorkloadSpec& spec, int k_from, int k_to,
                                  const SweepOptions& opts);

/// Single-k form of accuracy_vs_k.
KPoint evaluate_k(const WorkloadSpec& spec, int k, const SweepOptions& opts);

}  // namespace mgk::detect
