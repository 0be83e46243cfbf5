#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "gazeshutter/errors.hpp"
#include "gazeshutter/rng.hpp"
#include "gazeshutter/svm.hpp"

using namespace gazeshutter;

namespace {

Standardizer identity_standardizer(std::size_t dim) {
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.std.assign(dim, 1.0);
    return s;
}

// Independent dual-sum evaluation for cross-checking predictions.
double brute_force_decision(const SvmModel& m, std::span<const double> x_raw) {
    std::vector<double> z(x_raw.size());
    for (std::size_t j = 0; j < z.size(); ++j)
        z[j] = (x_raw[j] - m.standardizer.mean[j]) / m.standardizer.std[j];
    double f = m.bias;
    for (std::size_t i = 0; i < m.alpha.size(); ++i) {
        double sq = 0.0;
        const auto sv = m.support_vectors.row(i);
        for (std::size_t j = 0; j < z.size(); ++j) sq += (sv[j] - z[j]) * (sv[j] - z[j]);
        f += m.alpha[i] * m.labels[i] * std::exp(-m.gamma * sq);
    }
    return f;
}

// Largest KKT violation of the full decision function over the training set.
double max_kkt_violation(const SvmModel& m, const Matrix& x_std,
                         std::span<const PrivacyClass> labels, double c) {
    double worst = 0.0;
    // find alpha of every training row: zero unless it matches a stored SV
    for (std::size_t i = 0; i < x_std.rows; ++i) {
        const double y = labels[i] == PrivacyClass::Sensitive ? 1.0 : -1.0;
        double f = m.bias;
        for (std::size_t s = 0; s < m.alpha.size(); ++s)
            f += m.alpha[s] * m.labels[s] *
                 rbf_kernel(m.support_vectors.row(s), x_std.row(i), m.gamma);
        // recover alpha_i by matching the row bytes against stored SVs
        double alpha = 0.0;
        const auto row = x_std.row(i);
        for (std::size_t s = 0; s < m.alpha.size(); ++s) {
            const auto sv = m.support_vectors.row(s);
            if (std::equal(row.begin(), row.end(), sv.begin(), sv.end())) {
                alpha = m.alpha[s];
                break;
            }
        }
        const double margin = y * f;
        double violation = 0.0;
        if (alpha <= 0.0)
            violation = std::max(0.0, 1.0 - margin);
        else if (alpha >= c)
            violation = std::max(0.0, margin - 1.0);
        else
            violation = std::abs(margin - 1.0);
        worst = std::max(worst, violation);
    }
    return worst;
}

struct ToyData {
    Matrix x;
    std::vector<PrivacyClass> y;
};

ToyData random_blobs(Rng& rng, std::size_t n, std::size_t dim, double separation) {
    ToyData data;
    data.x.cols = dim;
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i % 2 == 0;
        std::vector<double> row(dim);
        for (std::size_t j = 0; j < dim; ++j)
            row[j] = (positive ? separation : -separation) * (j == 0 ? 1.0 : 0.2) +
                     rng.normal(0.0, 1.0);
        data.x.push_row(row);
        data.y.push_back(positive ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive);
    }
    return data;
}

}  // namespace

TEST_CASE("standardizer reproduces the hand-computed column statistics") {
    Matrix x(0, 0);
    x.cols = 2;
    x.push_row(std::vector<double>{1.0, 5.0});
    x.push_row(std::vector<double>{2.0, 5.0});
    x.push_row(std::vector<double>{3.0, 5.0});
    const auto s = fit_standardizer(x);
    CHECK(s.mean[0] == doctest::Approx(2.0));
    CHECK(s.std[0] == doctest::Approx(0.8164965809));
    CHECK(s.mean[1] == doctest::Approx(5.0));
    CHECK(s.std[1] == 1.0);  // constant column guard

    const auto z = standardize(s, std::vector<double>{1.0, 5.0});
    CHECK(z[0] == doctest::Approx(-1.2247448714));
    CHECK(z[1] == 0.0);

    Matrix tiny(1, 2);
    CHECK_THROWS_AS(fit_standardizer(tiny), DataError);
}

TEST_CASE("standardized training data has zero mean and unit variance") {
    Rng rng(3);
    Matrix x(0, 0);
    x.cols = 5;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> row(5);
        for (auto& v : row) v = rng.uniform(-3, 7);
        x.push_row(row);
    }
    const auto s = fit_standardizer(x);
    const auto z = standardize(s, x);
    for (std::size_t j = 0; j < z.cols; ++j) {
        double mean = 0, var = 0;
        for (std::size_t i = 0; i < z.rows; ++i) mean += z.row(i)[j];
        mean /= static_cast<double>(z.rows);
        for (std::size_t i = 0; i < z.rows; ++i)
            var += (z.row(i)[j] - mean) * (z.row(i)[j] - mean);
        var /= static_cast<double>(z.rows);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-9);
    }
}

TEST_CASE("rbf kernel identities") {
    Rng rng(5);
    std::vector<double> x{0.3, -1.2, 4.0};
    CHECK(rbf_kernel(x, x, 2.5) == 1.0);

    std::vector<double> y{0.3, -1.2, 5.0};  // squared distance 1
    CHECK(rbf_kernel(x, y, 1.0) == doctest::Approx(std::exp(-1.0)));

    for (int i = 0; i < 50; ++i) {
        std::vector<double> a(4), b(4);
        for (auto& v : a) v = rng.normal();
        for (auto& v : b) v = rng.normal();
        const double k = rbf_kernel(a, b, 0.7);
        CHECK(k == rbf_kernel(b, a, 0.7));
        CHECK(k > 0.0);
        CHECK(k <= 1.0);
    }
    std::vector<double> short_vec{1.0};
    CHECK_THROWS_AS(rbf_kernel(x, short_vec, 1.0), DataError);
}

TEST_CASE("smo solves a small separable problem exactly") {
    Matrix x(0, 0);
    x.cols = 2;
    x.push_row(std::vector<double>{2.0, 2.0});
    x.push_row(std::vector<double>{2.5, 1.5});
    x.push_row(std::vector<double>{-2.0, -2.0});
    x.push_row(std::vector<double>{-2.5, -1.5});
    const std::vector<PrivacyClass> y{PrivacyClass::Sensitive, PrivacyClass::Sensitive,
                                      PrivacyClass::NonSensitive, PrivacyClass::NonSensitive};
    SvmTrainOptions options;
    options.gamma = 0.5;
    const auto model = train_svm(x, y, identity_standardizer(2), options);

    for (std::size_t i = 0; i < x.rows; ++i)
        CHECK(svm_predict(model, x.row(i)).first == y[i]);
    CHECK(max_kkt_violation(model, x, y, options.c) < 1e-3);

    double alpha_dot_y = 0.0;
    for (std::size_t i = 0; i < model.alpha.size(); ++i) {
        alpha_dot_y += model.alpha[i] * model.labels[i];
        CHECK(model.alpha[i] > 0.0);
        CHECK(model.alpha[i] <= options.c + 1e-12);
    }
    CHECK(std::abs(alpha_dot_y) <= 1e-8);
}

TEST_CASE("rbf svm fits the xor pattern") {
    Rng rng(7);
    Matrix x(0, 0);
    x.cols = 2;
    std::vector<PrivacyClass> y;
    for (int i = 0; i < 40; ++i) {
        const double sx = (i & 1) ? 1.0 : -1.0;
        const double sy = (i & 2) ? 1.0 : -1.0;
        x.push_row(std::vector<double>{sx + rng.normal(0.0, 0.1), sy + rng.normal(0.0, 0.1)});
        y.push_back(sx * sy > 0 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive);
    }
    SvmTrainOptions options;
    options.gamma = 1.0;
    const auto model = train_svm(x, y, identity_standardizer(2), options);
    int correct = 0;
    for (std::size_t i = 0; i < x.rows; ++i)
        if (svm_predict(model, x.row(i)).first == y[i]) ++correct;
    CHECK(correct >= 38);  // >= 0.95 training accuracy
}

TEST_CASE("dual feasibility and kkt conditions hold on random small datasets") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 10 + rng.uniform_below(51);
        const auto dim = 2 + rng.uniform_below(9);
        const auto data = random_blobs(rng, n, dim, rng.uniform(0.2, 2.0));
        SvmTrainOptions options;
        options.gamma = 1.0 / static_cast<double>(dim);
        const auto model = train_svm(data.x, data.y, identity_standardizer(dim), options);

        double alpha_dot_y = 0.0;
        for (std::size_t i = 0; i < model.alpha.size(); ++i) {
            CHECK(model.alpha[i] >= 0.0);
            CHECK(model.alpha[i] <= options.c + 1e-12);
            alpha_dot_y += model.alpha[i] * model.labels[i];
        }
        CHECK(std::abs(alpha_dot_y) <= 1e-8);
        CHECK(max_kkt_violation(model, data.x, data.y, options.c) < 1e-3);
    }
}

TEST_CASE("duplicating every training point preserves the decision sign") {
    Rng rng(13);
    const auto data = random_blobs(rng, 30, 3, 2.5);
    SvmTrainOptions options;
    options.gamma = 0.4;
    const auto base = train_svm(data.x, data.y, identity_standardizer(3), options);

    Matrix doubled(0, 0);
    doubled.cols = 3;
    std::vector<PrivacyClass> y2;
    for (std::size_t i = 0; i < data.x.rows; ++i) {
        doubled.push_row(data.x.row(i));
        y2.push_back(data.y[i]);
    }
    for (std::size_t i = 0; i < data.x.rows; ++i) {
        doubled.push_row(data.x.row(i));
        y2.push_back(data.y[i]);
    }
    const auto twice = train_svm(doubled, y2, identity_standardizer(3), options);

    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> x(3);
        for (auto& v : x) v = rng.uniform(-4, 4);
        const double fa = svm_decision(base, x);
        const double fb = svm_decision(twice, x);
        if (std::abs(fa) > 0.05)  // skip the immediate vicinity of the boundary
            CHECK(fa * fb > 0.0);
    }
}

TEST_CASE("training-row permutation leaves decisions unchanged") {
    Rng rng(17);
    const auto data = random_blobs(rng, 24, 4, 2.0);
    SvmTrainOptions options;
    const auto base = train_svm(data.x, data.y, identity_standardizer(4), options);

    std::vector<std::size_t> perm(data.x.rows);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_below(i)]);
    Matrix shuffled(0, 0);
    shuffled.cols = 4;
    std::vector<PrivacyClass> y2;
    for (std::size_t i : perm) {
        shuffled.push_row(data.x.row(i));
        y2.push_back(data.y[i]);
    }
    const auto permuted = train_svm(shuffled, y2, identity_standardizer(4), options);

    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> x(4);
        for (auto& v : x) v = rng.uniform(-4, 4);
        const double fa = svm_decision(base, x);
        const double fb = svm_decision(permuted, x);
        if (std::abs(fa) > 0.05) CHECK(fa * fb > 0.0);
        CHECK(std::abs(fa - fb) < 0.02);
    }
}

TEST_CASE("single-class training data is rejected") {
    Matrix x(0, 0);
    x.cols = 2;
    x.push_row(std::vector<double>{1.0, 1.0});
    x.push_row(std::vector<double>{2.0, 2.0});
    const std::vector<PrivacyClass> y{PrivacyClass::Sensitive, PrivacyClass::Sensitive};
    CHECK_THROWS_AS(train_svm(x, y, identity_standardizer(2), {}), TrainingError);
}

TEST_CASE("decision value of zero classifies sensitive") {
    // a model with no support vectors and zero bias is a degenerate f(x) = 0
    SvmModel m;
    m.support_vectors.cols = 2;
    m.gamma = 1.0;
    m.standardizer = identity_standardizer(2);
    const auto [cls, f] = svm_predict(m, std::vector<double>{0.3, 0.4});
    CHECK(f == 0.0);
    CHECK(cls == PrivacyClass::Sensitive);
}

TEST_CASE("predictions match an independent dual-sum evaluation") {
    Rng rng(19);
    const auto data = random_blobs(rng, 30, 5, 1.0);
    const auto model = fit_svm(data.x, data.y, {});
    for (int probe = 0; probe < 50; ++probe) {
        std::vector<double> x(5);
        for (auto& v : x) v = rng.uniform(-5, 5);
        CHECK(svm_decision(model, x) == doctest::Approx(brute_force_decision(model, x)).epsilon(1e-12));
    }
}

TEST_CASE("standardize-then-predict equals pass-through prediction on standardized input") {
    Rng rng(23);
    const auto data = random_blobs(rng, 20, 3, 1.5);
    const auto model = fit_svm(data.x, data.y, {});

    SvmModel pass_through = model;
    pass_through.standardizer = identity_standardizer(3);
    for (int probe = 0; probe < 30; ++probe) {
        std::vector<double> x(3);
        for (auto& v : x) v = rng.uniform(-3, 3);
        const auto z = standardize(model.standardizer, x);
        CHECK(svm_decision(model, x) == doctest::Approx(svm_decision(pass_through, z)).epsilon(1e-12));
    }
}

TEST_CASE("concat keeps the eye block first") {
    FeatureVector52 eye{};
    Embedding68 emb{};
    eye[0] = 1.5;
    eye[51] = -2.0;
    emb[0] = 7.0;
    emb[67] = 9.0;
    const auto combined = concat_features(eye, emb);
    REQUIRE(combined.size() == 120);
    CHECK(combined[0] == 1.5);
    CHECK(combined[51] == -2.0);
    CHECK(combined[52] == 7.0);
    CHECK(combined[119] == 9.0);

    FeatureVector52 zero_eye{};
    Embedding68 zero_emb{};
    for (double v : concat_features(zero_eye, zero_emb)) CHECK(v == 0.0);
}

TEST_CASE("svm model files round-trip and reject unsupported dimensions") {
    Rng rng(29);
    Matrix x(0, 0);
    x.cols = kEyeFeatureDim;
    std::vector<PrivacyClass> y;
    for (int i = 0; i < 16; ++i) {
        std::vector<double> row(kEyeFeatureDim);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = rng.normal(i % 2 ? 1.0 : -1.0, 0.5);
        x.push_row(row);
        y.push_back(i % 2 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive);
    }
    const auto model = fit_svm(x, y, {});
    const auto dir = std::filesystem::temp_directory_path() / "gazeshutter_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / "svm_model.json";
    save_svm_model(model, path);
    const auto loaded = load_svm_model(path);
    CHECK(loaded.bias == model.bias);
    CHECK(loaded.alpha == model.alpha);
    CHECK(loaded.support_vectors.data == model.support_vectors.data);
    CHECK(loaded.train_fingerprint == model.train_fingerprint);

    for (int probe = 0; probe < 10; ++probe) {
        std::vector<double> v(kEyeFeatureDim);
        for (auto& e : v) e = rng.normal();
        CHECK(svm_decision(loaded, v) == svm_decision(model, v));
    }

    // a 10-d model file must be rejected on load
    Matrix x10(0, 0);
    x10.cols = 10;
    std::vector<PrivacyClass> y10;
    for (int i = 0; i < 8; ++i) {
        std::vector<double> row(10);
        for (auto& v : row) v = rng.normal(i % 2 ? 1.0 : -1.0, 0.4);
        x10.push_row(row);
        y10.push_back(i % 2 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive);
    }
    const auto small = fit_svm(x10, y10, {});
    const auto small_path = dir / "svm_small.json";
    save_svm_model(small, small_path);
    CHECK_THROWS_WITH_AS(load_svm_model(small_path), doctest::Contains("dimension"), DataError);
}
