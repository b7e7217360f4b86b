#include "fracsep/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fracsep/csvio.hpp"

namespace fracsep {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cur = trim(cur);
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

class Checker {
  public:
    void fail(const std::string& msg) { problems_.push_back(msg); }

    bool parse_double(const std::string& key, const std::string& v, double& out) {
        errno = 0;
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
            fail(key + ": not a number: '" + v + "'");
            return false;
        }
        out = x;
        return true;
    }

    bool parse_i64(const std::string& key, const std::string& v, int64_t& out) {
        errno = 0;
        char* end = nullptr;
        long long x = std::strtoll(v.c_str(), &end, 10);
        if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
            fail(key + ": not an integer: '" + v + "'");
            return false;
        }
        out = x;
        return true;
    }

    bool parse_u64(const std::string& key, const std::string& v, uint64_t& out) {
        errno = 0;
        char* end = nullptr;
        unsigned long long x = std::strtoull(v.c_str(), &end, 10);
        if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE) {
            fail(key + ": not an unsigned integer: '" + v + "'");
            return false;
        }
        out = x;
        return true;
    }

    void finish() const {
        if (problems_.empty()) return;
        std::ostringstream os;
        os << "config: " << problems_.size() << " problem(s)";
        for (const std::string& p : problems_) os << "\n  - " << p;
        throw std::invalid_argument(os.str());
    }

  private:
    std::vector<std::string> problems_;
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "model.gamma",      "barrier.kind",    "barrier.alpha",  "barrier.beta",
        "barrier.delta",    "profile.kind",    "profile.a",      "profile.left",
        "profile.right",    "profile.base",    "profile.center", "profile.width",
        "profile.amp",      "run.n_list",      "run.replicas",   "run.horizon",
        "run.seed",         "run.threads",     "run.output_dir", "compare.box_radius",
        "compare.n_pde",    "compare.times",   "test_functions"};
    return keys;
}

}  // namespace

BarrierSpec ExperimentConfig::barrier() const {
    if (barrier_kind == "none") return BarrierSpec::none();
    if (barrier_kind == "thick") return BarrierSpec::thick(alpha, beta);
    return BarrierSpec::thin_origin_column(alpha, beta, delta);
}

std::function<double(double)> ExperimentConfig::profile_fn() const {
    switch (profile) {
        case ProfileKind::Constant: {
            double a = profile_a;
            return [a](double) { return a; };
        }
        case ProfileKind::Step: {
            double lo = profile_left, hi = profile_right;
            return [lo, hi](double u) { return u < 0.0 ? lo : hi; };
        }
        case ProfileKind::Bump: {
            SmoothFn b = bump(profile_center, profile_width, profile_amp);
            double base = profile_base;
            return [b, base](double u) { return base + b.f(u); };
        }
    }
    return [](double) { return 0.5; };
}

std::vector<TestFunctionSpec> ExperimentConfig::test_function_specs() const {
    std::vector<TestFunctionSpec> out;
    out.reserve(test_functions.size());
    for (const std::string& name : test_functions) out.push_back(test_function_preset(name));
    return out;
}

std::vector<double> ExperimentConfig::snapshot_times() const {
    if (!times.empty()) return times;
    return {horizon / 4, horizon / 2, 3 * horizon / 4, horizon};
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "model.gamma = " << fmt_double(gamma) << "\n";
    os << "barrier.kind = " << barrier_kind << "\n";
    os << "barrier.alpha = " << fmt_double(alpha) << "\n";
    os << "barrier.beta = " << fmt_double(beta) << "\n";
    os << "barrier.delta = " << fmt_double(delta) << "\n";
    const char* pk = profile == ProfileKind::Constant ? "constant"
                     : profile == ProfileKind::Step   ? "step"
                                                      : "bump";
    os << "profile.kind = " << pk << "\n";
    os << "profile.a = " << fmt_double(profile_a) << "\n";
    os << "profile.left = " << fmt_double(profile_left) << "\n";
    os << "profile.right = " << fmt_double(profile_right) << "\n";
    os << "profile.base = " << fmt_double(profile_base) << "\n";
    os << "profile.center = " << fmt_double(profile_center) << "\n";
    os << "profile.width = " << fmt_double(profile_width) << "\n";
    os << "profile.amp = " << fmt_double(profile_amp) << "\n";
    os << "run.n_list = ";
    for (size_t i = 0; i < n_list.size(); ++i) os << (i ? "," : "") << n_list[i];
    os << "\n";
    os << "run.replicas = " << replicas << "\n";
    os << "run.horizon = " << fmt_double(horizon) << "\n";
    os << "run.seed = " << seed << "\n";
    os << "run.threads = " << threads << "\n";
    os << "run.output_dir = " << output_dir << "\n";
    os << "compare.box_radius = " << fmt_double(box_radius) << "\n";
    os << "compare.n_pde = " << n_pde << "\n";
    os << "compare.times = ";
    for (size_t i = 0; i < times.size(); ++i) os << (i ? "," : "") << fmt_double(times[i]);
    os << "\n";
    os << "test_functions = ";
    for (size_t i = 0; i < test_functions.size(); ++i) os << (i ? "," : "") << test_functions[i];
    os << "\n";
    return os.str();
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    Checker check;

    std::map<std::string, std::string> kv;
    std::vector<std::string> unknown;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            check.fail("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!known_keys().count(key)) {
            unknown.push_back(key);
            continue;
        }
        if (kv.count(key)) {
            check.fail("duplicate key: " + key);
            continue;
        }
        kv[key] = val;
    }
    if (!unknown.empty()) {
        std::string msg = "unknown keys:";
        for (const std::string& k : unknown) msg += " " + k;
        check.fail(msg);
    }

    auto has = [&kv](const char* k) { return kv.count(k) != 0; };

    if (has("model.gamma")) check.parse_double("model.gamma", kv["model.gamma"], cfg.gamma);
    if (has("barrier.kind")) {
        cfg.barrier_kind = kv["barrier.kind"];
        if (cfg.barrier_kind != "none" && cfg.barrier_kind != "thin" && cfg.barrier_kind != "thick")
            check.fail("barrier.kind must be one of none, thin, thick");
    }
    if (has("barrier.alpha")) check.parse_double("barrier.alpha", kv["barrier.alpha"], cfg.alpha);
    if (has("barrier.beta")) check.parse_double("barrier.beta", kv["barrier.beta"], cfg.beta);
    if (has("barrier.delta")) check.parse_double("barrier.delta", kv["barrier.delta"], cfg.delta);

    if (has("profile.kind")) {
        const std::string& pk = kv["profile.kind"];
        if (pk == "constant")
            cfg.profile = ProfileKind::Constant;
        else if (pk == "step")
            cfg.profile = ProfileKind::Step;
        else if (pk == "bump")
            cfg.profile = ProfileKind::Bump;
        else
            check.fail("profile.kind must be one of constant, step, bump");
    }
    if (has("profile.a")) check.parse_double("profile.a", kv["profile.a"], cfg.profile_a);
    if (has("profile.left")) check.parse_double("profile.left", kv["profile.left"], cfg.profile_left);
    if (has("profile.right")) check.parse_double("profile.right", kv["profile.right"], cfg.profile_right);
    if (has("profile.base")) check.parse_double("profile.base", kv["profile.base"], cfg.profile_base);
    if (has("profile.center")) check.parse_double("profile.center", kv["profile.center"], cfg.profile_center);
    if (has("profile.width")) check.parse_double("profile.width", kv["profile.width"], cfg.profile_width);
    if (has("profile.amp")) check.parse_double("profile.amp", kv["profile.amp"], cfg.profile_amp);

    if (has("run.n_list")) {
        cfg.n_list.clear();
        for (const std::string& tok : split_list(kv["run.n_list"])) {
            int64_t n = 0;
            if (check.parse_i64("run.n_list", tok, n)) cfg.n_list.push_back(n);
        }
    }
    if (has("run.replicas")) check.parse_i64("run.replicas", kv["run.replicas"], cfg.replicas);
    if (has("run.horizon")) check.parse_double("run.horizon", kv["run.horizon"], cfg.horizon);
    if (has("run.seed")) check.parse_u64("run.seed", kv["run.seed"], cfg.seed);
    if (has("run.threads")) {
        int64_t t = 0;
        if (check.parse_i64("run.threads", kv["run.threads"], t)) cfg.threads = static_cast<int>(t);
    }
    if (has("run.output_dir")) cfg.output_dir = kv["run.output_dir"];

    if (has("compare.box_radius"))
        check.parse_double("compare.box_radius", kv["compare.box_radius"], cfg.box_radius);
    if (has("compare.n_pde")) check.parse_i64("compare.n_pde", kv["compare.n_pde"], cfg.n_pde);
    if (has("compare.times")) {
        cfg.times.clear();
        for (const std::string& tok : split_list(kv["compare.times"])) {
            double t = 0.0;
            if (check.parse_double("compare.times", tok, t)) cfg.times.push_back(t);
        }
    }
    if (has("test_functions")) {
        cfg.test_functions = split_list(kv["test_functions"]);
    }

    // range validation, all at once
    if (!(cfg.gamma > 0.0 && cfg.gamma < 2.0)) check.fail("model.gamma must lie in (0, 2)");
    if (!(cfg.alpha > 0.0)) check.fail("barrier.alpha must be positive");
    if (!(cfg.beta >= 0.0)) check.fail("barrier.beta must be nonnegative");
    if (cfg.barrier_kind == "thin") {
        bool in_range = cfg.delta >= 0.0 && cfg.delta <= 1.0;
        bool summable = cfg.delta > cfg.gamma - 1.0;
        if (!in_range || !summable)
            check.fail("barrier.delta must lie in [0,1] and exceed gamma-1 (thin-set summability)");
    }
    auto level = [&check](const char* key, double v) {
        if (!(v >= 0.0 && v <= 1.0)) check.fail(std::string(key) + " must lie in [0, 1]");
    };
    switch (cfg.profile) {
        case ProfileKind::Constant:
            level("profile.a", cfg.profile_a);
            break;
        case ProfileKind::Step:
            level("profile.left", cfg.profile_left);
            level("profile.right", cfg.profile_right);
            break;
        case ProfileKind::Bump:
            level("profile.base", cfg.profile_base);
            level("profile.base + profile.amp", cfg.profile_base + cfg.profile_amp);
            if (!(cfg.profile_width > 0.0)) check.fail("profile.width must be positive");
            break;
    }
    if (cfg.n_list.empty()) check.fail("run.n_list must not be empty");
    for (int64_t n : cfg.n_list)
        if (n < 2) check.fail("run.n_list entries must be at least 2");
    if (cfg.replicas < 1) check.fail("run.replicas must be at least 1");
    if (!(cfg.horizon > 0.0)) check.fail("run.horizon must be positive");
    if (cfg.threads < 1) check.fail("run.threads must be at least 1");
    if (!(cfg.box_radius > 0.0)) check.fail("compare.box_radius must be positive");
    if (cfg.n_pde < 16) check.fail("compare.n_pde must be at least 16");
    for (size_t i = 0; i < cfg.times.size(); ++i) {
        if (!(cfg.times[i] > 0.0 && cfg.times[i] <= cfg.horizon)) {
            check.fail("compare.times must lie in (0, run.horizon]");
            break;
        }
        if (i > 0 && !(cfg.times[i] > cfg.times[i - 1])) {
            check.fail("compare.times must be strictly increasing");
            break;
        }
    }
    if (cfg.test_functions.empty()) check.fail("test_functions must not be empty");
    const auto names = test_function_preset_names();
    std::string bad;
    for (const std::string& t : cfg.test_functions)
        if (std::find(names.begin(), names.end(), t) == names.end()) bad += " " + t;
    if (!bad.empty()) check.fail("unknown test_functions:" + bad);

    check.finish();
    return cfg;
}

std::string config_hash_hex(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fracsep
