#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "gazeshutter/matrix.hpp"
#include "gazeshutter/types.hpp"

namespace gazeshutter {

// Per-dimension zero-mean unit-variance transform fit on training data only;
// test rows are transformed with the same parameters. Population variance;
// constant dimensions keep std 1 and pass through after centering.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;
};

Standardizer fit_standardizer(const Matrix& x);
std::vector<double> standardize(const Standardizer& s, std::span<const double> row);
Matrix standardize(const Standardizer& s, const Matrix& x);

// exp(-gamma * ||x - y||^2)
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

struct SvmTrainOptions {
    double c = 1.0;
    double gamma = 0.0;        // <= 0 selects 1/dimension
    double tolerance = 1e-3;   // maximal KKT violation at convergence
    long max_iterations = 2'000'000;
};

// RBF-SVM dual solution. Sensitive maps to +1, so f(x) >= 0 closes the
// shutter; only rows with alpha > 0 are stored.
struct SvmModel {
    Matrix support_vectors;  // standardized rows
    std::vector<double> alpha;
    std::vector<double> labels;  // +1 / -1
    double bias = 0.0;
    double gamma = 0.0;
    double c = 1.0;
    Standardizer standardizer;
    std::uint64_t train_fingerprint = 0;
};

// Sequential minimal optimization with second-order working-set selection
// (maximal-violating pair, ties broken toward the lowest index), run until
// every KKT violation is below the tolerance. Input rows must already be
// standardized; the standardizer is stored for prediction. Throws
// TrainingError on single-class input or non-convergence.
SvmModel train_svm(const Matrix& x_standardized, std::span<const PrivacyClass> y,
                   Standardizer standardizer, const SvmTrainOptions& options);

// fit_standardizer + standardize + train_svm on raw feature rows.
SvmModel fit_svm(const Matrix& x_raw, std::span<const PrivacyClass> y,
                 const SvmTrainOptions& options);

// x is a raw (unstandardized) row of the model's dimension.
double svm_decision(const SvmModel& model, std::span<const double> x);
std::pair<PrivacyClass, double> svm_predict(const SvmModel& model, std::span<const double> x);

// [eye | embedding]; the scene half only exists while the shutter is open.
std::array<double, kCombinedDim> concat_features(const FeatureVector52& eye,
                                                 const Embedding68& embedding);

// Versioned JSON dump with a dimension header; loading accepts only the two
// production dimensions (52 eye-only, 120 combined).
void save_svm_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_svm_model(const std::filesystem::path& path);

}  // namespace gazeshutter
