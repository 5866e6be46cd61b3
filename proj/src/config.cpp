#include "sparsevss/config.hpp"

#include "json.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace sparsevss {

namespace {

using nlohmann::json;
using Setter = std::function<void(ExperimentConfig&, const json&)>;

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
    throw ConfigError("config field '" + key + "': " + what);
}

json as_list(const json& v)
{
    return v.is_array() ? v : json::array({v});
}

int to_int(const std::string& key, const json& v)
{
    if (v.is_number_integer()) {
        return v.get<int>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 2e9) {
            return static_cast<int>(d);
        }
    }
    bad(key, "expected an integer, got " + v.dump());
}

double to_double(const std::string& key, const json& v)
{
    if (!v.is_number()) {
        bad(key, "expected a number, got " + v.dump());
    }
    return v.get<double>();
}

std::optional<double> to_optional_double(const std::string& key, const json& v)
{
    if (v.is_null()) {
        return std::nullopt;
    }
    return to_double(key, v);
}

std::vector<int> to_int_list(const std::string& key, const json& v)
{
    std::vector<int> out;
    for (const auto& item : as_list(v)) {
        out.push_back(to_int(key, item));
    }
    return out;
}

std::vector<double> to_double_list(const std::string& key, const json& v)
{
    std::vector<double> out;
    for (const auto& item : as_list(v)) {
        out.push_back(to_double(key, item));
    }
    return out;
}

std::vector<Variant> to_variant_list(const std::string& key, const json& v)
{
    std::vector<Variant> out;
    for (const auto& item : as_list(v)) {
        if (!item.is_string()) {
            bad(key, "expected algorithm names, got " + item.dump());
        }
        const auto parsed = parse_variant(item.get<std::string>());
        if (!parsed) {
            bad(key, "unknown algorithm '" + item.get<std::string>() + "'");
        }
        out.push_back(*parsed);
    }
    return out;
}

std::vector<CTableEntry> to_c_table(const std::string& key, const json& v)
{
    std::vector<CTableEntry> out;
    for (const auto& item : as_list(v)) {
        if (!item.is_object() || !item.contains("snr_db") || !item.contains("c") || item.size() != 2) {
            bad(key, "entries must be objects {\"snr_db\": x, \"c\": y}");
        }
        out.push_back({to_double(key, item.at("snr_db")), to_double(key, item.at("c"))});
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const json& v)
{
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    bad(key, "expected a non-negative integer, got " + v.dump());
}

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table{
        {"n_t", [](ExperimentConfig& c, const json& v) { c.n_t = to_int("n_t", v); }},
        {"n_r", [](ExperimentConfig& c, const json& v) { c.n_r = to_int("n_r", v); }},
        {"tap_length", [](ExperimentConfig& c, const json& v) { c.tap_length = to_int("tap_length", v); }},
        {"sparsity", [](ExperimentConfig& c, const json& v) { c.sparsity = to_int_list("sparsity", v); }},
        {"snr_db", [](ExperimentConfig& c, const json& v) { c.snr_db = to_double_list("snr_db", v); }},
        {"algorithms", [](ExperimentConfig& c, const json& v) { c.algorithms = to_variant_list("algorithms", v); }},
        {"mu", [](ExperimentConfig& c, const json& v) { c.mu = to_double("mu", v); }},
        {"mu_max", [](ExperimentConfig& c, const json& v) { c.mu_max = to_double("mu_max", v); }},
        {"c_threshold",
         [](ExperimentConfig& c, const json& v) { c.c_threshold = to_optional_double("c_threshold", v); }},
        {"c_table", [](ExperimentConfig& c, const json& v) { c.c_table = to_c_table("c_table", v); }},
        {"beta", [](ExperimentConfig& c, const json& v) { c.beta = to_double("beta", v); }},
        {"gamma_za", [](ExperimentConfig& c, const json& v) { c.gamma_za = to_optional_double("gamma_za", v); }},
        {"gamma_rza", [](ExperimentConfig& c, const json& v) { c.gamma_rza = to_optional_double("gamma_rza", v); }},
        {"epsilon_rza", [](ExperimentConfig& c, const json& v) { c.epsilon_rza = to_double("epsilon_rza", v); }},
        {"max_iterations",
         [](ExperimentConfig& c, const json& v) { c.max_iterations = to_int("max_iterations", v); }},
        {"stop_epsilon", [](ExperimentConfig& c, const json& v) { c.stop_epsilon = to_double("stop_epsilon", v); }},
        {"num_trials", [](ExperimentConfig& c, const json& v) { c.num_trials = to_int("num_trials", v); }},
        {"rng_seed", [](ExperimentConfig& c, const json& v) { c.rng_seed = to_u64("rng_seed", v); }},
        {"qam_orders", [](ExperimentConfig& c, const json& v) { c.qam_orders = to_int_list("qam_orders", v); }},
        {"esn0_range_db",
         [](ExperimentConfig& c, const json& v) { c.esn0_range_db = to_double_list("esn0_range_db", v); }},
        {"subcarriers", [](ExperimentConfig& c, const json& v) { c.subcarriers = to_int("subcarriers", v); }},
        {"cp_length", [](ExperimentConfig& c, const json& v) { c.cp_length = to_int("cp_length", v); }},
        {"ber_sparsity", [](ExperimentConfig& c, const json& v) { c.ber_sparsity = to_int("ber_sparsity", v); }},
        {"ber_training_snr_db",
         [](ExperimentConfig& c, const json& v) { c.ber_training_snr_db = to_double("ber_training_snr_db", v); }},
        {"ber_min_errors",
         [](ExperimentConfig& c, const json& v) { c.ber_min_errors = to_int("ber_min_errors", v); }},
        {"ber_min_frames",
         [](ExperimentConfig& c, const json& v) { c.ber_min_frames = to_int("ber_min_frames", v); }},
        {"ber_max_frames",
         [](ExperimentConfig& c, const json& v) { c.ber_max_frames = to_int("ber_max_frames", v); }},
        {"ber_frames_per_channel",
         [](ExperimentConfig& c, const json& v) { c.ber_frames_per_channel = to_int("ber_frames_per_channel", v); }},
        {"threads", [](ExperimentConfig& c, const json& v) { c.threads = to_int("threads", v); }},
    };
    return table;
}

void apply_field(ExperimentConfig& config, const std::string& key, const json& value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ConfigError("unknown config field '" + key + "'");
    }
    it->second(config, value);
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

}  // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) {
            k.push_back(name);
        }
        return k;
    }();
    return keys;
}

std::string config_to_json(const ExperimentConfig& c)
{
    json algorithms = json::array();
    for (Variant v : c.algorithms) {
        algorithms.push_back(std::string(to_string(v)));
    }
    json c_table = json::array();
    for (const auto& e : c.c_table) {
        c_table.push_back({{"snr_db", e.snr_db}, {"c", e.c}});
    }
    const json doc{
        {"n_t", c.n_t},
        {"n_r", c.n_r},
        {"tap_length", c.tap_length},
        {"sparsity", c.sparsity},
        {"snr_db", c.snr_db},
        {"algorithms", algorithms},
        {"mu", c.mu},
        {"mu_max", c.mu_max},
        {"c_threshold", optional_json(c.c_threshold)},
        {"c_table", c_table},
        {"beta", c.beta},
        {"gamma_za", optional_json(c.gamma_za)},
        {"gamma_rza", optional_json(c.gamma_rza)},
        {"epsilon_rza", c.epsilon_rza},
        {"max_iterations", c.max_iterations},
        {"stop_epsilon", c.stop_epsilon},
        {"num_trials", c.num_trials},
        {"rng_seed", c.rng_seed},
        {"qam_orders", c.qam_orders},
        {"esn0_range_db", c.esn0_range_db},
        {"subcarriers", c.subcarriers},
        {"cp_length", c.cp_length},
        {"ber_sparsity", c.ber_sparsity},
        {"ber_training_snr_db", c.ber_training_snr_db},
        {"ber_min_errors", c.ber_min_errors},
        {"ber_min_frames", c.ber_min_frames},
        {"ber_max_frames", c.ber_max_frames},
        {"ber_frames_per_channel", c.ber_frames_per_channel},
        {"threads", c.threads},
    };
    return doc.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view json_text, const ExperimentConfig& base)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    ExperimentConfig config = base;
    for (const auto& [key, value] : doc.items()) {
        apply_field(config, key, value);
    }
    return config;
}

void apply_override(ExperimentConfig& config, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    apply_field(config, key, value);
}

}  // namespace sparsevss
