#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "gazeshutter/dataset.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/rng.hpp"
#include "gazeshutter/scene.hpp"

using namespace gazeshutter;

namespace {

std::vector<std::uint8_t> uniform_image(int w, int h, std::uint8_t r, std::uint8_t g,
                                        std::uint8_t b) {
    std::vector<std::uint8_t> img(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < img.size(); i += 3) {
        img[i] = r;
        img[i + 1] = g;
        img[i + 2] = b;
    }
    return img;
}

SceneDescriptor random_descriptor(Rng& rng, double scale = 1.0) {
    SceneDescriptor d;
    for (auto& v : d) v = rng.normal(0.0, scale);
    return d;
}

SceneModel random_model(Rng& rng, double scale = 0.05) {
    SceneModel m = SceneModel::zeros();
    for (auto& v : m.w1) v = rng.normal(0.0, scale);
    for (auto& v : m.b1) v = rng.normal(0.0, scale);
    for (auto& v : m.w2) v = rng.normal(0.0, scale);
    for (auto& v : m.b2) v = rng.normal(0.0, scale);
    return m;
}

}  // namespace

TEST_CASE("uniform gray image: no gradients, one color bin per cell") {
    const auto img = uniform_image(64, 64, 128, 128, 128);
    const auto d = base_descriptor_rgb(img, 64, 64);
    REQUIRE(d.size() == kDescriptorDim);
    for (int cell = 0; cell < 16; ++cell) {
        const double* base = d.data() + cell * 64;
        double color_mass = 0.0;
        int nonzero_color = 0;
        for (int bin = 0; bin < 48; ++bin) {
            color_mass += base[bin];
            if (base[bin] > 0) ++nonzero_color;
        }
        CHECK(color_mass == doctest::Approx(1.0));
        CHECK(nonzero_color == 1);
        for (int bin = 48; bin < 64; ++bin) CHECK(base[bin] == 0.0);
    }
}

TEST_CASE("descriptor is deterministic and sensitive to content") {
    Rng rng(2);
    std::vector<std::uint8_t> img(32 * 32 * 3);
    for (auto& v : img) v = static_cast<std::uint8_t>(rng.uniform_below(256));
    const auto a = base_descriptor_rgb(img, 32, 32);
    const auto b = base_descriptor_rgb(img, 32, 32);
    CHECK(a == b);

    auto img2 = img;
    img2[0] = static_cast<std::uint8_t>(img2[0] ^ 0x80);
    CHECK(base_descriptor_rgb(img2, 32, 32) != a);
}

TEST_CASE("zero model predicts an even split") {
    const SceneModel m = SceneModel::zeros();
    SceneDescriptor d{};
    d[0] = 0.7;
    const auto out = forward(m, d);
    CHECK(out.probabilities[0] == doctest::Approx(0.5));
    CHECK(out.probabilities[1] == doctest::Approx(0.5));
}

TEST_CASE("softmax output sums to one for random models") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = random_model(rng, 0.3);
        const auto d = random_descriptor(rng, 2.0);
        const auto out = forward(m, d);
        CHECK(std::abs(out.probabilities[0] + out.probabilities[1] - 1.0) <= 1e-12);
        CHECK(out.embedding.size() == kEmbeddingDim);
        for (double e : out.embedding) CHECK(e >= 0.0);
    }
}

TEST_CASE("forward agrees with an independent matrix-vector evaluation") {
    Rng rng(5);
    const auto m = random_model(rng);
    const auto d = random_descriptor(rng);
    const auto out = forward(m, d);

    // second implementation, deliberately written differently
    std::vector<double> e(kEmbeddingDim);
    for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
        double z = std::inner_product(d.begin(), d.end(), m.w1.begin() + j * kDescriptorDim,
                                      m.b1[j]);
        e[j] = std::max(0.0, z);
    }
    double l0 = std::inner_product(e.begin(), e.end(), m.w2.begin(), m.b2[0]);
    double l1 = std::inner_product(e.begin(), e.end(), m.w2.begin() + kEmbeddingDim, m.b2[1]);
    const double p0 = 1.0 / (1.0 + std::exp(l1 - l0));

    for (std::size_t j = 0; j < kEmbeddingDim; ++j)
        CHECK(out.embedding[j] == doctest::Approx(e[j]).epsilon(1e-12));
    CHECK(out.probabilities[0] == doctest::Approx(p0).epsilon(1e-12));
}

TEST_CASE("cross-entropy of the zero model is ln 2") {
    Rng rng(7);
    std::vector<LabeledDescriptor> samples(6);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].descriptor = random_descriptor(rng);
        samples[i].label = i % 2 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive;
    }
    CHECK(cross_entropy(SceneModel::zeros(), samples) == doctest::Approx(std::log(2.0)));
}

namespace {

std::vector<LabeledDescriptor> two_clusters(Rng& rng, std::size_t per_class, double separation) {
    std::vector<double> direction(kDescriptorDim);
    double norm = 0.0;
    for (auto& v : direction) {
        v = rng.normal();
        norm += v * v;
    }
    norm = std::sqrt(norm);
    std::vector<LabeledDescriptor> samples;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const double sign = i < per_class ? 1.0 : -1.0;
        LabeledDescriptor s;
        for (std::size_t k = 0; k < kDescriptorDim; ++k)
            s.descriptor[k] = sign * 0.5 * separation * direction[k] / norm + rng.normal(0.0, 1.0);
        s.label = sign > 0 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive;
        samples.push_back(s);
    }
    return samples;
}

}  // namespace

TEST_CASE("training separates two linearly separable clusters") {
    Rng rng(11);
    const auto samples = two_clusters(rng, 10, 8.0);
    const auto model = train_scene_model(samples, 200, 0.2, 42);
    int correct = 0;
    for (const auto& s : samples)
        if (cnn_direct_classify(model, s.descriptor).first == s.label) ++correct;
    CHECK(correct == static_cast<int>(samples.size()));
    CHECK(cross_entropy(model, samples) < std::log(2.0));
}

TEST_CASE("training rejects single-class input") {
    Rng rng(13);
    std::vector<LabeledDescriptor> samples(4);
    for (auto& s : samples) {
        s.descriptor = random_descriptor(rng);
        s.label = PrivacyClass::Sensitive;
    }
    CHECK_THROWS_AS(train_scene_model(samples, 10, 0.1, 1), TrainingError);
}

TEST_CASE("training is deterministic for a fixed seed") {
    Rng rng(17);
    const auto samples = two_clusters(rng, 5, 4.0);
    const auto a = train_scene_model(samples, 50, 0.2, 9);
    const auto b = train_scene_model(samples, 50, 0.2, 9);
    CHECK(a.w1 == b.w1);
    CHECK(a.b1 == b.b1);
    CHECK(a.w2 == b.w2);
    CHECK(a.b2 == b.b2);
    CHECK(a.train_fingerprint == b.train_fingerprint);
}

TEST_CASE("training loss is non-increasing within tolerance") {
    Rng rng(19);
    const auto samples = two_clusters(rng, 6, 2.0);
    double previous = 1e300;
    for (int epochs : {1, 2, 5, 10, 20, 40, 80}) {
        const auto model = train_scene_model(samples, epochs, 0.3, 4);
        const double loss = cross_entropy(model, samples);
        CHECK(loss <= previous + 1e-6);
        previous = loss;
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(23);
    const auto samples = two_clusters(rng, 3, 2.0);
    SceneModel m = random_model(rng, 0.05);
    const auto analytic = cross_entropy_gradients(m, samples);

    struct Coord {
        std::vector<double> SceneModel::* model_block;
        std::vector<double> SceneGradients::* grad_block;
        std::size_t index;
    };
    std::vector<Coord> coords;
    for (int k = 0; k < 8; ++k)
        coords.push_back({&SceneModel::w1, &SceneGradients::w1, rng.uniform_below(m.w1.size())});
    for (int k = 0; k < 3; ++k)
        coords.push_back({&SceneModel::b1, &SceneGradients::b1, rng.uniform_below(m.b1.size())});
    for (int k = 0; k < 4; ++k)
        coords.push_back({&SceneModel::w2, &SceneGradients::w2, rng.uniform_below(m.w2.size())});
    coords.push_back({&SceneModel::b2, &SceneGradients::b2, 0});
    coords.push_back({&SceneModel::b2, &SceneGradients::b2, 1});

    const double eps = 1e-5;
    for (const auto& c : coords) {
        double& value = (m.*c.model_block)[c.index];
        const double original = value;
        value = original + eps;
        const double up = cross_entropy(m, samples);
        value = original - eps;
        const double down = cross_entropy(m, samples);
        value = original;
        const double numeric = (up - down) / (2 * eps);
        const double exact = (analytic.*c.grad_block)[c.index];
        const double relative =
            std::abs(exact - numeric) / std::max({std::abs(exact), std::abs(numeric), 1e-8});
        INFO("index=", c.index, " analytic=", exact, " numeric=", numeric);
        CHECK(relative < 1e-4);
    }
}

TEST_CASE("segment sampling picks one frame per maximal segment") {
    Recording rec;
    rec.person_id = "p01";
    rec.recording_id = 1;
    for (int t = 0; t < 40; ++t) rec.samples.push_back({t * 1.0, 0.5, 0.5, 40, 0.99});
    for (int t = 0; t < 40; ++t) {
        SceneFrame f;
        f.t = t;
        f.descriptor[0] = t;
        rec.scene.push_back(f);
    }
    rec.annotations = {{0, 10, "office", "work", 5},
                       {10, 20, "office", "work", 5},  // merges with the previous
                       {20, 30, "street", "walk", 6},
                       {30, 40, "atm", "banking", 1}};
    const auto out = sample_segment_images(rec, 99, 2);
    REQUIRE(out.samples.size() == 3);
    CHECK(out.skipped_segments == 0);
    CHECK(out.samples[0].label == PrivacyClass::NonSensitive);
    CHECK(out.samples[2].label == PrivacyClass::Sensitive);
    // the merged segment draws from [0, 20)
    CHECK(out.samples[0].descriptor[0] < 20.0);
    CHECK(out.samples[1].descriptor[0] >= 20.0);
    CHECK(out.samples[1].descriptor[0] < 30.0);

    // single-frame segment picks that frame; fixed seed repeats selections
    const auto again = sample_segment_images(rec, 99, 2);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        CHECK(again.samples[i].descriptor[0] == out.samples[i].descriptor[0]);
}

TEST_CASE("segment with no frames is skipped with a count") {
    Recording rec;
    rec.person_id = "p01";
    rec.recording_id = 1;
    for (int t = 0; t < 20; ++t) rec.samples.push_back({t * 1.0, 0.5, 0.5, 40, 0.99});
    SceneFrame f;
    f.t = 1.0;
    rec.scene.push_back(f);
    rec.annotations = {{0, 10, "a", "b", 5}, {10, 20, "c", "d", 1}};
    const auto out = sample_segment_images(rec, 1, 2);
    CHECK(out.samples.size() == 1);
    CHECK(out.skipped_segments == 1);
}

TEST_CASE("scene model files round-trip and validate shapes") {
    Rng rng(29);
    const auto m = random_model(rng);
    const auto dir = std::filesystem::temp_directory_path() / "gazeshutter_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / "scene_model.json";
    save_scene_model(m, path);
    const auto loaded = load_scene_model(path);
    CHECK(loaded.w1 == m.w1);
    CHECK(loaded.b1 == m.b1);
    CHECK(loaded.w2 == m.w2);
    CHECK(loaded.b2 == m.b2);

    auto broken = m;
    broken.w1.pop_back();
    CHECK_THROWS_AS(save_scene_model(broken, path), DataError);
}

TEST_CASE("classification ties at 0.5 go to the sensitive class") {
    const SceneModel m = SceneModel::zeros();
    SceneDescriptor d{};
    const auto [cls, score] = cnn_direct_classify(m, d);
    CHECK(score == doctest::Approx(0.5));
    CHECK(cls == PrivacyClass::Sensitive);
}
