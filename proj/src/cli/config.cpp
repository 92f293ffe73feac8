#include "gem/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gem::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_unsigned(std::string_view v)
{
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view v)
{
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::size_t> parse_widths(std::string_view v)
{
    std::vector<std::size_t> out;
    for (const auto& item : split_list(v)) {
        out.push_back(parse_unsigned(item));
    }
    return out;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Prefer the shortest representation that parses back to the same value.
    for (int p = 1; p < 17; ++p) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", p, v);
        if (std::strtod(shorter, nullptr) == v) {
            return shorter;
        }
    }
    return buf;
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

std::string fmt(const std::vector<std::size_t>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + std::to_string(v[i]);
    }
    return out;
}

std::string fmt(const std::vector<std::string>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + v[i];
    }
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define GEM_DOUBLE(sec, key, expr)                                                                 \
    Field{sec, key, [](ExperimentConfig& c, std::string_view v) { c.expr = parse_double(v); },      \
          [](const ExperimentConfig& c) { return fmt(static_cast<double>(c.expr)); }}
#define GEM_UINT(sec, key, expr)                                                                   \
    Field{sec, key,                                                                                \
          [](ExperimentConfig& c, std::string_view v) {                                            \
              c.expr = static_cast<decltype(c.expr)>(parse_unsigned(v));                           \
          },                                                                                       \
          [](const ExperimentConfig& c) { return fmt(static_cast<std::uint64_t>(c.expr)); }}
#define GEM_WIDTHS(sec, key, expr)                                                                 \
    Field{sec, key, [](ExperimentConfig& c, std::string_view v) { c.expr = parse_widths(v); },      \
          [](const ExperimentConfig& c) { return fmt(c.expr); }}

std::string encoding_name(envs::EncodingMode m)
{
    return m == envs::EncodingMode::pixel ? "pixel" : "feature";
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        Field{"env", "name", [](ExperimentConfig& c, std::string_view v) { c.trainer.env = std::string(v); },
              [](const ExperimentConfig& c) { return c.trainer.env; }},
        Field{"env", "encoding",
              [](ExperimentConfig& c, std::string_view v) {
                  try {
                      c.trainer.encoding = envs::encoding_from_string(v);
                  } catch (const std::invalid_argument& e) {
                      throw ConfigError(e.what());
                  }
              },
              [](const ExperimentConfig& c) { return encoding_name(c.trainer.encoding); }},
        Field{"env", "episode_length",
              [](ExperimentConfig& c, std::string_view v) { c.trainer.episode_length = static_cast<int>(parse_unsigned(v)); },
              [](const ExperimentConfig& c) { return std::to_string(c.trainer.episode_length); }},

        GEM_WIDTHS("network", "policy_hidden", trainer.policy_hidden),
        GEM_UINT("network", "time_buckets", trainer.time_buckets),
        GEM_WIDTHS("network", "g_hidden", trainer.g_hidden),
        GEM_WIDTHS("network", "f_widths", trainer.f_widths),
        Field{"network", "embedding",
              [](ExperimentConfig& c, std::string_view v) {
                  try {
                      c.trainer.embedding = agent::embedding_from_string(v);
                  } catch (const std::invalid_argument& e) {
                      throw ConfigError(e.what());
                  }
              },
              [](const ExperimentConfig& c) { return agent::to_string(c.trainer.embedding); }},

        GEM_DOUBLE("gem", "c", trainer.gem.c),
        GEM_UINT("gem", "n_neg", trainer.gem.n_neg),
        GEM_DOUBLE("gem", "w_reg", trainer.gem.w_reg),
        GEM_DOUBLE("gem", "alpha", trainer.gem.alpha),

        GEM_DOUBLE("ar", "q", trainer.ar.q),
        GEM_DOUBLE("ar", "delta", trainer.ar.delta),
        GEM_DOUBLE("ar", "C", trainer.ar.scale),

        GEM_DOUBLE("normalizer", "scale", trainer.norm_scale),
        GEM_DOUBLE("normalizer", "mean", trainer.norm_mean),
        GEM_DOUBLE("normalizer", "decay", trainer.norm_decay),

        GEM_UINT("trainer", "steps", steps),
        GEM_UINT("trainer", "batch_size", trainer.batch_size),
        GEM_UINT("trainer", "trace_length", trainer.trace_length),
        GEM_UINT("trainer", "trace_period", trainer.trace_period),
        GEM_DOUBLE("trainer", "w_ent", trainer.w_ent),
        GEM_DOUBLE("trainer", "policy_lr", trainer.policy_lr),
        GEM_DOUBLE("trainer", "gem_lr", trainer.gem_lr),
        GEM_DOUBLE("trainer", "beta1", trainer.beta1),
        GEM_DOUBLE("trainer", "beta2", trainer.beta2),
        Field{"trainer", "use_extrinsic",
              [](ExperimentConfig& c, std::string_view v) { c.trainer.use_extrinsic = parse_bool(v); },
              [](const ExperimentConfig& c) { return fmt(c.trainer.use_extrinsic); }},
        Field{"trainer", "intrinsic",
              [](ExperimentConfig& c, std::string_view v) {
                  try {
                      c.trainer.intrinsic = agent::intrinsic_from_string(v);
                  } catch (const std::invalid_argument& e) {
                      throw ConfigError(e.what());
                  }
              },
              [](const ExperimentConfig& c) { return agent::to_string(c.trainer.intrinsic); }},
        GEM_UINT("trainer", "oracle_period", trainer.oracle_period),
        GEM_DOUBLE("trainer", "oracle_decay", trainer.oracle_decay),
        GEM_DOUBLE("trainer", "tracker_decay", trainer.tracker_decay),
        GEM_UINT("trainer", "seed", trainer.seed),

        GEM_UINT("eval", "every", eval_every),
        GEM_UINT("eval", "episodes", eval_episodes),

        GEM_UINT("output", "checkpoint_every", checkpoint_every),
        GEM_UINT("output", "heatmap_every", heatmap_every),
        GEM_UINT("output", "embedding_every", embedding_every),

        GEM_UINT("density", "batch_size", density.batch_size),
        GEM_UINT("density", "n_neg", density.n_neg),
        GEM_DOUBLE("density", "w_reg", density.w_reg),
        GEM_UINT("density", "steps", density.steps),
        GEM_DOUBLE("density", "learning_rate", density.learning_rate),
        GEM_DOUBLE("density", "beta1", density.beta1),
        GEM_DOUBLE("density", "beta2", density.beta2),
        GEM_UINT("density", "hidden", density.hidden),
        GEM_UINT("density", "embed_dim", density.embed_dim),
        GEM_UINT("density", "n_bucket", density.n_bucket),
        GEM_DOUBLE("density", "c_fixed", density.c_fixed),
        GEM_DOUBLE("density", "c_learned", density.c_learned),
        GEM_UINT("density", "quadrature_nodes", density.quadrature_nodes),
        GEM_UINT("density", "n_points", bimodal.n_points),
        Field{"density", "variants",
              [](ExperimentConfig& c, std::string_view v) { c.density_variants = split_list(v); },
              [](const ExperimentConfig& c) { return fmt(c.density_variants); }},
    };
    return table;
}

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<Entry> tokenize(std::string_view text)
{
    std::vector<Entry> out;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        out.push_back({section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return out;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

ExperimentConfig default_config(const std::string& env)
{
    ExperimentConfig c;
    c.trainer = agent::TrainerConfig::for_env(env);
    return c;
}

ExperimentConfig parse_config(std::string_view text)
{
    const auto entries = tokenize(text);
    std::string env = "2-rooms";
    for (const auto& e : entries) {
        if (e.section == "env" && e.key == "name") {
            env = e.value;
        }
    }
    ExperimentConfig config = default_config(env);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : entries) {
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const Field& f) { return f.section == e.section && f.key == e.key; });
        if (it == table.end()) {
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "' in section ["
                              + e.section + "]");
        }
        if (!seen.insert({e.section, e.key}).second) {
            throw ConfigError("line " + std::to_string(e.line) + ": duplicate key '" + e.key + "'");
        }
        try {
            it->set(config, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + " (" + e.key + "): " + err.what());
        }
    }
    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string to_ini(const ExperimentConfig& config)
{
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            section = f.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        out += f.key + " = " + f.get(config) + "\n";
    }
    return out;
}

std::string config_hash(const ExperimentConfig& config)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : to_ini(config)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate(const ExperimentConfig& config)
{
    try {
        config.trainer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (config.eval_episodes == 0) {
        throw ConfigError("eval.episodes must be positive");
    }
    const auto names = [] {
        std::vector<std::string> n;
        for (const auto& v : oracles::CollapseVariant::all()) {
            n.push_back(v.name());
        }
        return n;
    }();
    for (const auto& v : config.density_variants) {
        if (std::find(names.begin(), names.end(), v) == names.end()) {
            throw ConfigError("unknown density variant '" + v + "'");
        }
    }
    if (config.density.batch_size == 0 || config.density.n_neg == 0 || config.density.n_bucket == 0) {
        throw ConfigError("density batch size, negatives and buckets must be positive");
    }
}

}  // namespace gem::cli
