#include "gazeshutter/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "gazeshutter/csvio.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/hash.hpp"

namespace gazeshutter {

using nlohmann::json;

Standardizer fit_standardizer(const Matrix& x) {
    if (x.rows < 2) throw DataError("standardizer needs at least 2 rows");
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.std.assign(x.cols, 0.0);
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        auto row = x.row(i);
        for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] += row[j];
    }
    for (double& m : s.mean) m *= inv_n;
    for (std::size_t i = 0; i < x.rows; ++i) {
        auto row = x.row(i);
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double d = row[j] - s.mean[j];
            s.std[j] += d * d;
        }
    }
    for (double& v : s.std) {
        v = std::sqrt(v * inv_n);  // population
        if (v <= 0.0) v = 1.0;
    }
    return s;
}

std::vector<double> standardize(const Standardizer& s, std::span<const double> row) {
    if (row.size() != s.mean.size())
        throw DataError("row has " + std::to_string(row.size()) + " dimensions, standardizer has " +
                        std::to_string(s.mean.size()));
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - s.mean[j]) / s.std[j];
    return out;
}

Matrix standardize(const Standardizer& s, const Matrix& x) {
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        auto in_row = x.row(i);
        auto out_row = out.row(i);
        for (std::size_t j = 0; j < x.cols; ++j)
            out_row[j] = (in_row[j] - s.mean[j]) / s.std[j];
    }
    return out;
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (x.size() != y.size()) throw DataError("rbf kernel dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

namespace {

constexpr double kTau = 1e-12;

// Dual problem: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with
// Q_ij = y_i y_j K_ij. gradient_i = (Qa)_i - 1.
struct Smo {
    const std::vector<double>& kernel;  // n x n
    std::span<const double> y;
    std::size_t n;
    double c;
    std::vector<double> alpha;
    std::vector<double> gradient;

    Smo(const std::vector<double>& k, std::span<const double> labels, double box)
        : kernel(k), y(labels), n(labels.size()), c(box), alpha(n, 0.0), gradient(n, -1.0) {}

    double k_at(std::size_t i, std::size_t j) const { return kernel[i * n + j]; }

    bool in_up(std::size_t i) const {
        return (y[i] > 0 && alpha[i] < c) || (y[i] < 0 && alpha[i] > 0);
    }
    bool in_low(std::size_t i) const {
        return (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < c);
    }

    // Maximal-violating-pair selection; the second index minimizes the
    // second-order objective decrease. Returns false at optimality.
    bool select_pair(std::size_t& out_i, std::size_t& out_j, double eps) const {
        double m = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_up(t)) continue;
            const double v = -y[t] * gradient[t];
            if (v > m) {
                m = v;
                i = t;
            }
        }
        double low = std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double v = -y[t] * gradient[t];
            low = std::min(low, v);
            if (v < m) {
                const double b = m - v;
                double a = k_at(i, i) + k_at(t, t) - 2.0 * k_at(i, t);
                if (a <= 0.0) a = kTau;
                const double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if (i == n || m - low < eps || j == n) return false;
        out_i = i;
        out_j = j;
        return true;
    }

    void update_pair(std::size_t i, std::size_t j) {
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        // In kernel (not Q) terms the curvature is ||phi_i - phi_j||^2 for
        // both label configurations.
        if (y[i] != y[j]) {
            double quad = k_at(i, i) + k_at(j, j) - 2.0 * k_at(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-gradient[i] - gradient[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0 && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = c - diff;
            } else if (diff <= 0.0 && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = k_at(i, i) + k_at(j, j) - 2.0 * k_at(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (gradient[i] - gradient[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = sum - c;
            } else if (sum <= c && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = sum - c;
            } else if (sum <= c && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double dai = (alpha[i] - old_ai) * y[i];
        const double daj = (alpha[j] - old_aj) * y[j];
        for (std::size_t t = 0; t < n; ++t)
            gradient[t] += y[t] * (k_at(t, i) * dai + k_at(t, j) * daj);
    }

    // Offset satisfying the KKT conditions: averaged over free vectors when
    // any exist, otherwise the midpoint of the feasible interval.
    double bias() const {
        double sum = 0.0;
        std::size_t free_count = 0;
        double lower = -std::numeric_limits<double>::infinity();
        double upper = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * gradient[t];
            if (alpha[t] > 0.0 && alpha[t] < c) {
                sum += v;
                ++free_count;
            }
            if (in_up(t)) lower = std::max(lower, v);
            if (in_low(t)) upper = std::min(upper, v);
        }
        if (free_count > 0) return sum / static_cast<double>(free_count);
        return 0.5 * (lower + upper);
    }
};

}  // namespace

SvmModel train_svm(const Matrix& x, std::span<const PrivacyClass> y_class,
                   Standardizer standardizer, const SvmTrainOptions& options) {
    if (x.rows != y_class.size()) throw DataError("feature rows and labels differ in length");
    if (x.rows == 0) throw TrainingError("empty training set");

    std::vector<double> y(x.rows);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        y[i] = y_class[i] == PrivacyClass::Sensitive ? 1.0 : -1.0;
        if (y[i] > 0) ++positives;
    }
    if (positives == 0 || positives == x.rows)
        throw TrainingError("svm training needs both classes present");

    const double gamma =
        options.gamma > 0.0 ? options.gamma : 1.0 / static_cast<double>(x.cols);

    // Full Gram matrix; desk-scale training sets keep this small.
    const std::size_t n = x.rows;
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = rbf_kernel(x.row(i), x.row(j), gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    Smo smo(kernel, y, options.c);
    long iterations = 0;
    std::size_t i = 0, j = 0;
    while (smo.select_pair(i, j, options.tolerance)) {
        smo.update_pair(i, j);
        if (++iterations > options.max_iterations)
            throw TrainingError("smo did not converge within " +
                                std::to_string(options.max_iterations) + " iterations");
    }

    SvmModel model;
    model.bias = smo.bias();
    model.gamma = gamma;
    model.c = options.c;
    model.standardizer = std::move(standardizer);
    model.support_vectors.cols = x.cols;
    for (std::size_t t = 0; t < n; ++t) {
        if (smo.alpha[t] <= 0.0) continue;
        model.support_vectors.push_row(x.row(t));
        model.alpha.push_back(smo.alpha[t]);
        model.labels.push_back(y[t]);
    }

    std::uint64_t h = fnv1a_doubles({x.data.data(), x.data.size()});
    model.train_fingerprint = fnv1a_doubles({y.data(), y.size()}, h);
    return model;
}

SvmModel fit_svm(const Matrix& x_raw, std::span<const PrivacyClass> y,
                 const SvmTrainOptions& options) {
    Standardizer s = fit_standardizer(x_raw);
    const Matrix x_std = standardize(s, x_raw);
    return train_svm(x_std, y, std::move(s), options);
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
    const std::vector<double> z = standardize(model.standardizer, x);
    double f = model.bias;
    for (std::size_t i = 0; i < model.alpha.size(); ++i)
        f += model.alpha[i] * model.labels[i] *
             rbf_kernel(model.support_vectors.row(i), z, model.gamma);
    return f;
}

std::pair<PrivacyClass, double> svm_predict(const SvmModel& model, std::span<const double> x) {
    const double f = svm_decision(model, x);
    return {f >= 0.0 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive, f};
}

std::array<double, kCombinedDim> concat_features(const FeatureVector52& eye,
                                                 const Embedding68& embedding) {
    std::array<double, kCombinedDim> out{};
    std::copy(eye.begin(), eye.end(), out.begin());
    std::copy(embedding.begin(), embedding.end(), out.begin() + kEyeFeatureDim);
    return out;
}

void save_svm_model(const SvmModel& model, const std::filesystem::path& path) {
    json j;
    j["format"] = "svm-model";
    j["version"] = 1;
    j["dim"] = model.support_vectors.cols;
    j["gamma"] = model.gamma;
    j["c"] = model.c;
    j["bias"] = model.bias;
    j["alpha"] = model.alpha;
    j["labels"] = model.labels;
    j["standardizer"] = {{"mean", model.standardizer.mean}, {"std", model.standardizer.std}};
    j["train_fingerprint"] = model.train_fingerprint;
    json rows = json::array();
    for (std::size_t i = 0; i < model.support_vectors.rows; ++i) {
        auto row = model.support_vectors.row(i);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["support_vectors"] = std::move(rows);
    auto out = open_output(path);
    out << j.dump() << '\n';
}

SvmModel load_svm_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "svm-model" || j.value("version", 0) != 1)
        throw DataError(path.string() + ": not a version-1 svm model file");

    const auto dim = j.at("dim").get<std::size_t>();
    if (dim != kEyeFeatureDim && dim != kCombinedDim)
        throw DataError(path.string() + ": unsupported feature dimension " + std::to_string(dim) +
                        " (expected 52 or 120)");

    SvmModel m;
    m.gamma = j.at("gamma").get<double>();
    m.c = j.at("c").get<double>();
    m.bias = j.at("bias").get<double>();
    m.alpha = j.at("alpha").get<std::vector<double>>();
    m.labels = j.at("labels").get<std::vector<double>>();
    m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer.std = j.at("standardizer").at("std").get<std::vector<double>>();
    m.train_fingerprint = j.value("train_fingerprint", std::uint64_t{0});
    m.support_vectors.cols = dim;
    for (const auto& row : j.at("support_vectors")) {
        const auto values = row.get<std::vector<double>>();
        m.support_vectors.push_row(values);
    }
    if (m.alpha.size() != m.support_vectors.rows || m.labels.size() != m.support_vectors.rows ||
        m.standardizer.mean.size() != dim || m.standardizer.std.size() != dim)
        throw DataError(path.string() + ": inconsistent model shapes");
    return m;
}

}  // namespace gazeshutter
