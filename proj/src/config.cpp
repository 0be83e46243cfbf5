#include "gazeshutter/config.hpp"

#include <charconv>
#include <fstream>

#include "gazeshutter/errors.hpp"

namespace gazeshutter {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueFile::KeyValueFile(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ": expected 'key = value', line " +
                            std::to_string(line_no));
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw DataError(path.string() + ": empty key or value, line " +
                            std::to_string(line_no));
        if (values_.count(key))
            throw DataError(path.string() + ": duplicate key '" + key + "', line " +
                            std::to_string(line_no));
        values_[key] = value;
        consumed_[key] = false;
    }
}

double KeyValueFile::get_double(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    double out = 0.0;
    const std::string& v = it->second;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw DataError(path_.string() + ": value of '" + key + "' is not a number");
    return out;
}

long KeyValueFile::get_long(const std::string& key, long fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    long out = 0;
    const std::string& v = it->second;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw DataError(path_.string() + ": value of '" + key + "' is not an integer");
    return out;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    std::uint64_t out = 0;
    const std::string& v = it->second;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw DataError(path_.string() + ": value of '" + key + "' is not an unsigned integer");
    return out;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw DataError(path_.string() + ": value of '" + key + "' must be true/false");
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    return it->second;
}

void KeyValueFile::finish() const {
    for (const auto& [key, used] : consumed_)
        if (!used) throw DataError(path_.string() + ": unknown key '" + key + "'");
}

PipelineConfig default_config() { return {}; }

PipelineConfig load_config(const std::filesystem::path& path) {
    PipelineConfig c;
    KeyValueFile f(path);
    c.events.confidence_threshold =
        f.get_double("validity_threshold", c.events.confidence_threshold);
    c.events.dispersion_threshold =
        f.get_double("dispersion_threshold", c.events.dispersion_threshold);
    c.events.min_fixation_duration =
        f.get_double("min_fixation_duration", c.events.min_fixation_duration);
    c.events.min_blink_duration = f.get_double("min_blink_duration", c.events.min_blink_duration);
    c.events.max_blink_duration = f.get_double("max_blink_duration", c.events.max_blink_duration);
    c.events.max_gap = f.get_double("max_gap", c.events.max_gap);
    c.events.large_saccade_threshold =
        f.get_double("large_saccade_threshold", c.events.large_saccade_threshold);
    c.window_duration = f.get_double("window_duration", c.window_duration);
    c.window_step = f.get_double("window_step", c.window_step);
    c.cutoff = static_cast<int>(f.get_long("cutoff", c.cutoff));
    c.svm_c = f.get_double("svm_c", c.svm_c);
    c.svm_gamma = f.get_double("svm_gamma", c.svm_gamma);
    c.svm_tolerance = f.get_double("svm_tolerance", c.svm_tolerance);
    c.svm_max_iterations = f.get_long("svm_max_iterations", c.svm_max_iterations);
    c.scene_epochs = static_cast<int>(f.get_long("scene_epochs", c.scene_epochs));
    c.scene_learning_rate = f.get_double("scene_learning_rate", c.scene_learning_rate);
    c.scene_seed = f.get_u64("scene_seed", c.scene_seed);
    c.train_stride = static_cast<int>(f.get_long("train_stride", c.train_stride));
    f.finish();

    if (c.cutoff < 1 || c.cutoff > 7) throw DataError("cutoff must lie in 1..7");
    if (c.window_duration <= 0 || c.window_step <= 0)
        throw DataError("window_duration and window_step must be > 0");
    if (c.train_stride < 1) throw DataError("train_stride must be >= 1");
    return c;
}

}  // namespace gazeshutter
