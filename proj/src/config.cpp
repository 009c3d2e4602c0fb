#include "cevlab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

namespace cevlab {

namespace {

struct KeyInfo {
    std::string_view canonical;
    bool required;
};

constexpr std::array kKeys{
    KeyInfo{"model.k", true},
    KeyInfo{"model.l", true},
    KeyInfo{"model.sigma", true},
    KeyInfo{"model.a", true},
    KeyInfo{"model.x0", true},
    KeyInfo{"grid.t_end", false},
    KeyInfo{"grid.n_steps", false},
    KeyInfo{"experiment", true},
    KeyInfo{"experiment.scheme", false},
    KeyInfo{"experiment.n_paths", false},
    KeyInfo{"experiment.seed", false},
    KeyInfo{"experiment.ref_exponent", false},
    KeyInfo{"experiment.test_exponents", false},
    KeyInfo{"experiment.payoff", false},
    KeyInfo{"experiment.strike", false},
    KeyInfo{"output.format", false},
    KeyInfo{"output.path", false},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Maps bare and sectioned spellings onto the canonical key.
std::optional<std::string_view> canonical_key(std::string_view key) {
    if (key == "out") return "output.path";
    if (key == "experiment.name") return "experiment";
    for (const auto& info : kKeys) {
        if (info.canonical == key) return info.canonical;
        const auto dot = info.canonical.rfind('.');
        if (dot != std::string_view::npos && info.canonical.substr(dot + 1) == key) return info.canonical;
    }
    return std::nullopt;
}

std::string_view bare_name(std::string_view canonical) {
    const auto dot = canonical.rfind('.');
    return dot == std::string_view::npos ? canonical : canonical.substr(dot + 1);
}

struct Entry {
    std::string value;
    std::string origin;  // "line 3", "flag --model.k", ...
};

using EntryMap = std::map<std::string, Entry, std::less<>>;

void put(EntryMap& entries, std::string_view key, std::string value, std::string origin, bool allow_replace) {
    const auto canon = canonical_key(key);
    if (!canon) throw ParseError(origin + ": unknown key '" + std::string(key) + "'");
    auto it = entries.find(*canon);
    if (it != entries.end() && !allow_replace)
        throw ParseError(origin + ": duplicate key '" + std::string(key) + "' (first set at " + it->second.origin + ")");
    entries[std::string(*canon)] = Entry{std::move(value), std::move(origin)};
}

void read_flat(std::string_view text, EntryMap& entries) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto origin = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(origin + ": expected key=value, got '" + std::string(line) + "'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(origin + ": empty key");
        put(entries, key, std::string(trim(line.substr(eq + 1))), origin, false);
    }
}

void read_report(std::string_view text, EntryMap& entries) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: invalid JSON: ") + e.what());
    }
    const auto prov = doc.find("provenance");
    if (prov == doc.end() || !prov->is_object() || !prov->contains("config") || !(*prov)["config"].is_object())
        throw ParseError("report: missing provenance.config block");
    for (const auto& [key, value] : (*prov)["config"].items()) {
        if (!value.is_string()) throw ParseError("report key " + key + ": expected a string value");
        put(entries, key, value.get<std::string>(), "report key " + key, false);
    }
}

const Entry* find(const EntryMap& entries, std::string_view canonical) {
    const auto it = entries.find(canonical);
    return it == entries.end() ? nullptr : &it->second;
}

double to_double(const Entry& e, std::string_view key) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ParseError(e.origin + ": " + std::string(key) + " must be a finite number, got '" + e.value + "'");
    return v;
}

template <typename Int>
Int to_integer(const Entry& e, std::string_view key) {
    Int v{};
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(e.origin + ": " + std::string(key) + " must be an integer, got '" + e.value + "'");
    return v;
}

// "4,5,6" or the inclusive range "4..9".
std::vector<int> to_exponents(const Entry& e) {
    std::vector<int> out;
    const std::string_view v = trim(e.value);
    if (const auto dots = v.find(".."); dots != std::string_view::npos) {
        const Entry lo{std::string(trim(v.substr(0, dots))), e.origin};
        const Entry hi{std::string(trim(v.substr(dots + 2))), e.origin};
        const int a = to_integer<int>(lo, "test_exponents");
        const int b = to_integer<int>(hi, "test_exponents");
        if (b < a) throw ParseError(e.origin + ": empty exponent range '" + e.value + "'");
        for (int i = a; i <= b; ++i) out.push_back(i);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto comma = v.find(',', pos);
        const auto item = trim(v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        out.push_back(to_integer<int>(Entry{std::string(item), e.origin}, "test_exponents"));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

}  // namespace

std::optional<Experiment> parse_experiment(std::string_view name) noexcept {
    if (name == "check") return Experiment::Check;
    if (name == "simulate") return Experiment::Simulate;
    if (name == "convergence") return Experiment::Convergence;
    if (name == "moments") return Experiment::Moments;
    if (name == "negativity") return Experiment::Negativity;
    if (name == "price") return Experiment::Price;
    return std::nullopt;
}

std::string_view to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::Check: return "check";
        case Experiment::Simulate: return "simulate";
        case Experiment::Convergence: return "convergence";
        case Experiment::Moments: return "moments";
        case Experiment::Negativity: return "negativity";
        case Experiment::Price: return "price";
    }
    return "unknown";
}

std::string RunConfig::resolved_output_path() const {
    if (!output_path.empty()) return output_path;
    return "cevlab-" + std::string(to_string(experiment)) + (format == OutputFormat::Json ? ".json" : ".csv");
}

std::map<std::string, std::string> RunConfig::resolved() const {
    std::string exps;
    for (std::size_t i = 0; i < test_exponents.size(); ++i) {
        if (i > 0) exps += ',';
        exps += std::to_string(test_exponents[i]);
    }
    return {
        {"model.k", format_double(model.k)},
        {"model.l", format_double(model.l)},
        {"model.sigma", format_double(model.sigma)},
        {"model.a", format_double(model.a)},
        {"model.x0", format_double(model.x0)},
        {"grid.t_end", format_double(t_end)},
        {"grid.n_steps", std::to_string(n_steps)},
        {"experiment", std::string(to_string(experiment))},
        {"experiment.scheme", std::string(to_string(scheme))},
        {"experiment.n_paths", std::to_string(n_paths)},
        {"experiment.seed", std::to_string(seed)},
        {"experiment.ref_exponent", std::to_string(ref_exponent)},
        {"experiment.test_exponents", exps},
        {"experiment.payoff", std::string(to_string(payoff.kind))},
        {"experiment.strike", format_double(payoff.strike)},
        {"output.format", format == OutputFormat::Json ? "json" : "csv"},
        {"output.path", output_path},
    };
}

std::string to_config_text(const RunConfig& config) {
    std::ostringstream os;
    for (const auto& [key, value] : config.resolved()) os << key << '=' << value << '\n';
    return os.str();
}

RunConfig parse_config(std::string_view text, const std::vector<Override>& overrides) {
    EntryMap entries;
    const auto body = trim(text);
    if (!body.empty() && body.front() == '{')
        read_report(body, entries);
    else
        read_flat(text, entries);
    for (const auto& o : overrides) put(entries, o.key, o.value, "flag --" + o.key, true);

    for (const auto& info : kKeys) {
        if (info.required && find(entries, info.canonical) == nullptr)
            throw ParseError("missing key: " + std::string(bare_name(info.canonical)));
    }

    RunConfig cfg;
    cfg.model.k = to_double(*find(entries, "model.k"), "k");
    cfg.model.l = to_double(*find(entries, "model.l"), "l");
    cfg.model.sigma = to_double(*find(entries, "model.sigma"), "sigma");
    cfg.model.a = to_double(*find(entries, "model.a"), "a");
    cfg.model.x0 = to_double(*find(entries, "model.x0"), "x0");

    const Entry& exp = *find(entries, "experiment");
    const auto kind = parse_experiment(exp.value);
    if (!kind) throw ParseError(exp.origin + ": unknown experiment '" + exp.value + "'");
    cfg.experiment = *kind;

    if (const auto* e = find(entries, "grid.t_end")) cfg.t_end = to_double(*e, "t_end");
    if (const auto* e = find(entries, "grid.n_steps")) cfg.n_steps = to_integer<std::size_t>(*e, "n_steps");
    if (const auto* e = find(entries, "experiment.scheme")) {
        const auto s = parse_scheme(e->value);
        if (!s) throw ParseError(e->origin + ": unknown scheme '" + e->value + "'");
        cfg.scheme = *s;
    }
    if (const auto* e = find(entries, "experiment.n_paths")) cfg.n_paths = to_integer<std::size_t>(*e, "n_paths");
    if (const auto* e = find(entries, "experiment.seed")) cfg.seed = to_integer<std::uint64_t>(*e, "seed");
    if (const auto* e = find(entries, "experiment.ref_exponent")) cfg.ref_exponent = to_integer<int>(*e, "ref_exponent");
    if (const auto* e = find(entries, "experiment.test_exponents")) cfg.test_exponents = to_exponents(*e);
    if (const auto* e = find(entries, "experiment.payoff")) {
        const auto p = parse_payoff(e->value);
        if (!p) throw ParseError(e->origin + ": unknown payoff '" + e->value + "'");
        cfg.payoff.kind = *p;
    }
    if (const auto* e = find(entries, "experiment.strike")) cfg.payoff.strike = to_double(*e, "strike");
    if (const auto* e = find(entries, "output.format")) {
        if (e->value == "csv")
            cfg.format = OutputFormat::Csv;
        else if (e->value == "json")
            cfg.format = OutputFormat::Json;
        else
            throw ParseError(e->origin + ": output format must be csv or json, got '" + e->value + "'");
    }
    if (const auto* e = find(entries, "output.path")) cfg.output_path = e->value;

    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    try {
        cfg.model.check();
    } catch (const InvalidParams& e) {
        throw ValidationError(e.what());
    }
    if (!(cfg.t_end > 0.0)) throw ValidationError("t_end must be > 0");
    if (cfg.n_steps < 1) throw ValidationError("n_steps must be >= 1");

    const bool is_report = cfg.experiment == Experiment::Convergence || cfg.experiment == Experiment::Moments ||
                           cfg.experiment == Experiment::Negativity || cfg.experiment == Experiment::Price;
    if (is_report && cfg.n_paths < 1000)
        throw ValidationError("n_paths must be >= 1000 for " + std::string(to_string(cfg.experiment)) + " reports");
    if (cfg.experiment == Experiment::Simulate && cfg.n_paths < 1) throw ValidationError("n_paths must be >= 1");
    if (!(cfg.payoff.strike >= 0.0)) throw ValidationError("strike must be >= 0");

    const bool semidiscrete = cfg.scheme == SchemeId::SemiDiscrete || cfg.experiment == Experiment::Negativity;

    if (cfg.experiment == Experiment::Convergence) {
        if (cfg.test_exponents.empty()) throw ValidationError("test_exponents must not be empty");
        for (std::size_t i = 0; i < cfg.test_exponents.size(); ++i) {
            if (cfg.test_exponents[i] < 0) throw ValidationError("test exponents must be >= 0");
            if (i > 0 && cfg.test_exponents[i] <= cfg.test_exponents[i - 1])
                throw ValidationError("test exponents must be strictly ascending");
        }
        const int e_max = cfg.test_exponents.back();
        if (cfg.ref_exponent < e_max + 3)
            throw ValidationError("ref_exponent must be at least the largest test exponent + 3 (got " +
                                  std::to_string(cfg.ref_exponent) + " vs " + std::to_string(e_max) + ")");
        if (cfg.ref_exponent > 24) throw ValidationError("ref_exponent must be <= 24");
        if (semidiscrete) {
            std::vector<int> levels = cfg.test_exponents;
            levels.push_back(cfg.ref_exponent);
            for (int e : levels) {
                const double dt = std::ldexp(cfg.t_end, -e);
                const auto rep = validate_assumption_a(cfg.model, dt);
                if (!rep.drift_condition_ok)
                    throw ValidationError("Assumption A violated: k*l < a*sigma^2/2 (margin " +
                                          format_double(rep.margin) + ")");
                if (!rep.step_condition_ok)
                    throw ValidationError("level e=" + std::to_string(e) + " (dt=" + format_double(dt) +
                                          ") violates Assumption A: max step is " + format_double(rep.max_step));
            }
        }
        return;
    }

    if (cfg.experiment != Experiment::Check && semidiscrete) {
        const double dt = cfg.t_end / static_cast<double>(cfg.n_steps);
        const auto rep = validate_assumption_a(cfg.model, dt);
        if (!rep.drift_condition_ok)
            throw ValidationError("Assumption A violated: k*l < a*sigma^2/2 (margin " + format_double(rep.margin) + ")");
        if (!rep.step_condition_ok)
            throw ValidationError("Assumption A violated: dt=" + format_double(dt) + " exceeds max step " +
                                  format_double(rep.max_step));
    }
}

}  // namespace cevlab
