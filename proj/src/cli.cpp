#include "rmstable/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "rmstable/charfn.hpp"
#include "rmstable/errors.hpp"
#include "rmstable/io.hpp"
#include "rmstable/limits.hpp"
#include "rmstable/parallel.hpp"
#include "rmstable/spectral.hpp"

namespace rms {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- validation helpers -------------------------------------------------

std::string at(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }

void need_object(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw ConfigError(ptr.empty() ? "/" : ptr, "must be an object");
}

void allow_keys(const json& j, const std::string& ptr, const std::set<std::string>& keys) {
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError(at(ptr, k), "unknown field");
}

const json& need(const json& j, const std::string& ptr, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(at(ptr, key), "required field missing");
    return j.at(key);
}

double number(const json& j, const std::string& ptr, const std::string& key, std::optional<double> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(at(ptr, key), "required field missing");
    }
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(at(ptr, key), "must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(ptr, key), "must be finite");
    return x;
}

std::uint64_t unsigned_int(const json& j, const std::string& ptr, const std::string& key,
                           std::optional<std::uint64_t> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(at(ptr, key), "required field missing");
    }
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(at(ptr, key), "must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string one_of(const json& j, const std::string& ptr, const std::string& key, const std::set<std::string>& allowed,
                   std::optional<std::string> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(at(ptr, key), "required field missing");
    }
    const json& v = j.at(key);
    if (!v.is_string() || !allowed.count(v.get<std::string>())) {
        std::string opts;
        for (const auto& a : allowed) opts += (opts.empty() ? "" : "|") + a;
        throw ConfigError(at(ptr, key), "must be one of " + opts);
    }
    return v.get<std::string>();
}

std::vector<double> vector_of(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw ConfigError(ptr, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(at(ptr, std::to_string(i)), "must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

std::vector<std::vector<double>> grid_of(const json& j, const std::string& ptr, const std::string& key,
                                         std::size_t dim) {
    const json& g = need(j, ptr, key);
    std::string p = at(ptr, key);
    if (!g.is_array() || g.empty()) throw ConfigError(p, "must be a nonempty array of points");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::string pi = at(p, std::to_string(i));
        auto v = vector_of(g[i], pi);
        if (v.size() != dim) throw ConfigError(pi, "point must have N = " + std::to_string(dim) + " entries");
        out.push_back(std::move(v));
    }
    return out;
}

void range(bool ok, const std::string& ptr, const std::string& msg) {
    if (!ok) throw ConfigError(ptr, msg);
}

std::size_t dimension(const json& j, const std::string& ptr) {
    std::uint64_t n = unsigned_int(j, ptr, "N");
    range(n >= 1 && n <= 32, at(ptr, "N"), "must lie in [1,32]");
    return static_cast<std::size_t>(n);
}

double alpha_of(const json& j, const std::string& ptr, bool allow_two, std::optional<double> def = {}) {
    double a = number(j, ptr, "alpha", def);
    range(a > 0.0 && (allow_two ? a <= 2.0 : a < 2.0), at(ptr, "alpha"),
          allow_two ? "must lie in (0,2]" : "must lie in (0,2)");
    return a;
}

// ---- numeric helpers ----------------------------------------------------

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double fr = pos - static_cast<double>(lo);
    return lo + 1 < v.size() ? v[lo] * (1.0 - fr) + v[lo + 1] * fr : v[lo];
}

json check(const std::string& name, double statistic, double threshold, bool pass) {
    return {{"name", name}, {"statistic", statistic}, {"threshold", threshold}, {"pass", pass}};
}

std::string join_s(const std::vector<double>& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ";" : "") + fmt17(s[i]);
    return out;
}

void finish(const fs::path& out, json summary, const std::vector<std::string>& artifacts,
            std::chrono::steady_clock::time_point t0) {
    summary["artifacts"] = artifacts;
    write_text(out / "summary.json", summary.dump(2) + "\n");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(out / "timing.json", json{{"wall_clock_seconds", secs}}.dump(2) + "\n");
}

bool all_pass(const json& checks) {
    for (const auto& c : checks)
        if (!c.at("pass").get<bool>()) return false;
    return true;
}

// Isotropic unit Hermitian direction: s^T diag(R) for unit s is one coordinate of
// a uniform point on the sphere in N^2 real dimensions.
double isotropic_abs_moment(double alpha, std::size_t dim) {
    double d = static_cast<double>(dim * dim);
    return std::exp(std::lgamma(d / 2.0) + std::lgamma((alpha + 1.0) / 2.0) - 0.5 * std::log(M_PI) -
                    std::lgamma((d + alpha) / 2.0));
}

}  // namespace

SpectralMeasure parse_measure(const json& j, const std::string& ptr, std::size_t dim) {
    need_object(j, ptr);
    std::string type = one_of(j, ptr, "type", {"isotropic", "elliptical", "dirac", "orbital"});
    if (type == "isotropic") {
        allow_keys(j, ptr, {"type"});
        return Isotropic{};
    }
    if (type == "elliptical") {
        allow_keys(j, ptr, {"type", "sigma", "kappa"});
        double s = number(j, ptr, "sigma");
        range(s > 0.0, at(ptr, "sigma"), "must be positive");
        double k = number(j, ptr, "kappa", 0.0);
        range(k > -s * s / static_cast<double>(dim), at(ptr, "kappa"), "must exceed -sigma^2/N");
        return Elliptical{s, k};
    }
    if (type == "dirac") {
        allow_keys(j, ptr, {"type", "p"});
        double p = number(j, ptr, "p");
        range(p >= 0.0 && p <= 1.0, at(ptr, "p"), "must lie in [0,1]");
        return DiracIdentity{p};
    }
    allow_keys(j, ptr, {"type", "orbits"});
    const json& orbs = need(j, ptr, "orbits");
    std::string po = at(ptr, "orbits");
    if (!orbs.is_array() || orbs.empty()) throw ConfigError(po, "must be a nonempty array");
    std::vector<std::pair<std::vector<double>, double>> reps;
    double total = 0.0;
    for (std::size_t i = 0; i < orbs.size(); ++i) {
        std::string pi = at(po, std::to_string(i));
        need_object(orbs[i], pi);
        allow_keys(orbs[i], pi, {"eigenvalues", "weight"});
        auto ev = vector_of(need(orbs[i], pi, "eigenvalues"), at(pi, "eigenvalues"));
        range(ev.size() == dim, at(pi, "eigenvalues"), "must have N entries");
        range(std::any_of(ev.begin(), ev.end(), [](double x) { return x != 0.0; }), at(pi, "eigenvalues"),
              "must not be all zero");
        double w = number(orbs[i], pi, "weight", orbs.size() == 1 ? std::optional<double>(1.0) : std::nullopt);
        range(w >= 0.0, at(pi, "weight"), "must be nonnegative");
        total += w;
        reps.emplace_back(ev, w);
    }
    range(std::abs(total - 1.0) <= 1e-12, po, "weights must sum to 1");
    return Orbital::from_spectra(reps);
}

EnsembleConfig parse_ensemble(const json& j, const std::string& ptr) {
    need_object(j, ptr);
    EnsembleConfig e;
    e.kind = one_of(j, ptr, "kind", {"gue", "gaussian", "elliptical", "dirac", "doa_pareto", "direction", "dyadic"});
    e.dim = dimension(j, ptr);
    if (e.kind == "gue" || e.kind == "dyadic") {
        allow_keys(j, ptr, {"kind", "N"});
    } else if (e.kind == "gaussian") {
        allow_keys(j, ptr, {"kind", "N", "sigma", "kappa"});
        e.sigma = number(j, ptr, "sigma");
        range(e.sigma > 0.0, at(ptr, "sigma"), "must be positive");
        e.kappa = number(j, ptr, "kappa", 0.0);
    } else if (e.kind == "elliptical") {
        allow_keys(j, ptr, {"kind", "N", "alpha", "sigma", "kappa", "y0"});
        e.alpha = alpha_of(j, ptr, true);
        e.sigma = number(j, ptr, "sigma");
        range(e.sigma > 0.0, at(ptr, "sigma"), "must be positive");
        e.kappa = number(j, ptr, "kappa", 0.0);
        range(e.kappa > -e.sigma * e.sigma / static_cast<double>(e.dim), at(ptr, "kappa"), "must exceed -sigma^2/N");
        e.y0 = number(j, ptr, "y0", 0.0);
    } else if (e.kind == "dirac") {
        allow_keys(j, ptr, {"kind", "N", "alpha", "gamma", "p", "y0"});
        e.alpha = alpha_of(j, ptr, true);
        e.gamma = number(j, ptr, "gamma", 1.0);
        range(e.gamma > 0.0, at(ptr, "gamma"), "must be positive");
        e.p = number(j, ptr, "p");
        range(e.p >= 0.0 && e.p <= 1.0, at(ptr, "p"), "must lie in [0,1]");
        e.y0 = number(j, ptr, "y0", 0.0);
    } else if (e.kind == "doa_pareto") {
        allow_keys(j, ptr, {"kind", "N", "alpha", "measure"});
        e.alpha = alpha_of(j, ptr, false);
        e.measure = parse_measure(need(j, ptr, "measure"), at(ptr, "measure"), e.dim);
    } else {  // direction
        allow_keys(j, ptr, {"kind", "N", "alpha", "measure"});
        e.alpha = alpha_of(j, ptr, true, 2.0);
        e.measure = parse_measure(need(j, ptr, "measure"), at(ptr, "measure"), e.dim);
    }
    return e;
}

EnsembleSpec parse_spec(const json& j, const std::string& ptr) {
    need_object(j, ptr);
    allow_keys(j, ptr, {"N", "alpha", "gamma", "y0", "measure"});
    EnsembleSpec s;
    s.dim = dimension(j, ptr);
    s.alpha = alpha_of(j, ptr, true);
    s.y0 = number(j, ptr, "y0", 0.0);
    s.measure = parse_measure(need(j, ptr, "measure"), at(ptr, "measure"), s.dim);
    // an elliptical measure without explicit gamma gets the scale that makes the
    // law match the elliptical sampler, exp(-q(S)^{alpha/2})
    std::optional<double> def = 1.0;
    if (const auto* e = std::get_if<Elliptical>(&s.measure)) {
        range(s.alpha < 2.0, at(ptr, "alpha"), "must lie in (0,2) for an elliptical measure");
        def = elliptical_constants(e->sigma, e->kappa, s.alpha, s.dim).gamma_scale;
    }
    s.gamma = number(j, ptr, "gamma", def);
    range(s.gamma > 0.0, at(ptr, "gamma"), "must be positive");
    return s;
}

SampleBatch draw_ensemble(const EnsembleConfig& e, std::size_t n, const Stream& stream) {
    if (e.kind == "gue") return sample_gue_batch(e.dim, n, stream);
    if (e.kind == "gaussian") return sample_gaussian_invariant(e.sigma, e.kappa, e.dim, n, stream);
    if (e.kind == "elliptical") return sample_elliptical_stable(e.sigma, e.kappa, e.alpha, e.y0, e.dim, n, stream);
    if (e.kind == "dirac") return sample_dirac_stable(e.alpha, e.gamma, e.p, e.y0, e.dim, n, stream);
    if (e.kind == "doa_pareto") return sample_doa_pareto(e.measure, e.alpha, e.dim, n, stream);
    if (e.kind == "direction") return sample_direction_batch(e.measure, e.alpha, e.dim, n, stream);
    if (e.kind == "dyadic") return sample_dyadic_batch(e.dim, n, stream);
    throw ParameterError("unknown ensemble kind " + e.kind);
}

namespace {

const std::set<std::string> kForms{"matrix", "diag", "eig", "empirical_matrix", "empirical_diag",
                                   "empirical_spherical"};

struct CltTarget {
    std::string type;
    double alpha = 2.0, gamma = 1.0, sigma = 1.0, kappa = 0.0;
};

CltTarget parse_target(const json& j, const std::string& ptr, std::size_t dim) {
    need_object(j, ptr);
    CltTarget t;
    t.type = one_of(j, ptr, "type", {"isotropic", "gaussian", "elliptical", "gaussian_from_source"});
    if (t.type == "isotropic") {
        allow_keys(j, ptr, {"type", "alpha", "gamma"});
        t.alpha = alpha_of(j, ptr, true);
        t.gamma = number(j, ptr, "gamma", 1.0);
        range(t.gamma > 0.0, at(ptr, "gamma"), "must be positive");
    } else if (t.type == "gaussian" || t.type == "elliptical") {
        allow_keys(j, ptr, t.type == "gaussian" ? std::set<std::string>{"type", "sigma", "kappa"}
                                                : std::set<std::string>{"type", "sigma", "kappa", "alpha"});
        t.sigma = number(j, ptr, "sigma");
        range(t.sigma > 0.0, at(ptr, "sigma"), "must be positive");
        t.kappa = number(j, ptr, "kappa", 0.0);
        range(t.kappa > -t.sigma * t.sigma / static_cast<double>(dim), at(ptr, "kappa"), "must exceed -sigma^2/N");
        t.alpha = t.type == "gaussian" ? 2.0 : alpha_of(j, ptr, true);
    } else {
        allow_keys(j, ptr, {"type"});
    }
    return t;
}

void common_root(const json& cfg, const std::set<std::string>& keys) {
    need_object(cfg, "");
    std::set<std::string> all = keys;
    all.insert({"schema_version", "seed", "description"});
    allow_keys(cfg, "", all);
    const json& v = need(cfg, "", "schema_version");
    if (!v.is_string() || v.get<std::string>() != "1") throw ConfigError("/schema_version", "must be the string \"1\"");
    unsigned_int(cfg, "", "seed");
    if (cfg.contains("description") && !cfg.at("description").is_string())
        throw ConfigError("/description", "must be a string");
}

std::size_t count_of(const json& cfg, const std::string& key, std::uint64_t min, std::optional<std::uint64_t> def = {}) {
    std::uint64_t n = unsigned_int(cfg, "", key, def);
    range(n >= min, "/" + key, "must be at least " + std::to_string(min));
    range(n <= 100000000, "/" + key, "must be at most 1e8");
    return static_cast<std::size_t>(n);
}

struct SampleCfg {
    EnsembleConfig ens;
    std::size_t n;
};
SampleCfg parse_sample(const json& cfg) {
    common_root(cfg, {"ensemble", "n"});
    return {parse_ensemble(need(cfg, "", "ensemble"), "/ensemble"), count_of(cfg, "n", 1)};
}

struct CfCfg {
    EnsembleSpec spec;
    std::vector<std::vector<double>> grid;
    std::vector<std::string> forms;
    std::size_t n_mc;
    std::optional<EnsembleConfig> ens;
    std::size_t n = 0;
    double z;
};
CfCfg parse_cf(const json& cfg) {
    common_root(cfg, {"spec", "grid", "forms", "n_mc", "ensemble", "n", "z"});
    CfCfg c;
    c.spec = parse_spec(need(cfg, "", "spec"), "/spec");
    c.grid = grid_of(cfg, "", "grid", c.spec.dim);
    const json& f = need(cfg, "", "forms");
    if (!f.is_array() || f.empty()) throw ConfigError("/forms", "must be a nonempty array");
    bool empirical = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i].is_string() || !kForms.count(f[i].get<std::string>()))
            throw ConfigError("/forms/" + std::to_string(i), "unknown form");
        c.forms.push_back(f[i].get<std::string>());
        empirical = empirical || c.forms.back().rfind("empirical", 0) == 0;
    }
    c.n_mc = count_of(cfg, "n_mc", 1, 20000);
    c.z = number(cfg, "", "z", 4.0);
    range(c.z > 0.0, "/z", "must be positive");
    if (empirical) {
        c.ens = parse_ensemble(need(cfg, "", "ensemble"), "/ensemble");
        range(c.ens->dim == c.spec.dim, "/ensemble/N", "must equal /spec/N");
        c.n = count_of(cfg, "n", 1);
    }
    return c;
}

struct DpCfg {
    EnsembleConfig ens;
    std::size_t n;
    std::vector<std::vector<double>> grid;
    double tol;
};
DpCfg parse_dp(const json& cfg) {
    common_root(cfg, {"ensemble", "n", "grid", "tolerance"});
    DpCfg d;
    d.ens = parse_ensemble(need(cfg, "", "ensemble"), "/ensemble");
    d.n = count_of(cfg, "n", 2);
    d.grid = grid_of(cfg, "", "grid", d.ens.dim);
    d.tol = number(cfg, "", "tolerance", 0.02);
    range(d.tol >= 0.0, "/tolerance", "must be nonnegative");
    return d;
}

struct CltCfg {
    EnsembleConfig src;
    CltTarget target;
    CltSetup setup;
    double tol, z;
};
CltCfg parse_clt(const json& cfg) {
    common_root(cfg, {"source", "target", "alpha", "b", "shift", "m_schedule", "grid", "s0", "n", "tolerance", "z",
                      "estimator"});
    CltCfg c;
    c.src = parse_ensemble(need(cfg, "", "source"), "/source");
    c.target = parse_target(need(cfg, "", "target"), "/target", c.src.dim);
    c.setup.alpha = alpha_of(cfg, "", true);
    if (cfg.contains("b") && !cfg.at("b").is_null()) {
        double b = number(cfg, "", "b");
        range(b > 0.0, "/b", "must be positive or null");
        c.setup.b = b;
    }
    c.setup.shift = one_of(cfg, "", "shift", {"zero", "mean"}, std::string("zero")) == "mean" ? ShiftRule::mean
                                                                                              : ShiftRule::zero;
    range(!(c.setup.shift == ShiftRule::mean && c.setup.alpha <= 1.0), "/shift", "mean shift requires alpha > 1");
    const json& ms = need(cfg, "", "m_schedule");
    if (!ms.is_array() || ms.empty()) throw ConfigError("/m_schedule", "must be a nonempty array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (!ms[i].is_number_unsigned() || ms[i].get<std::uint64_t>() == 0)
            throw ConfigError("/m_schedule/" + std::to_string(i), "must be a positive integer");
        c.setup.m_schedule.push_back(ms[i].get<std::size_t>());
    }
    c.setup.s_grid = grid_of(cfg, "", "grid", c.src.dim);
    if (!c.setup.b) {
        c.setup.s0 = vector_of(need(cfg, "", "s0"), "/s0");
        range(c.setup.s0.size() == c.src.dim, "/s0", "must have N entries");
    }
    c.setup.n = count_of(cfg, "n", 2);
    c.setup.spherical = one_of(cfg, "", "estimator", {"diagonal", "spherical"}, std::string("diagonal")) == "spherical";
    c.tol = number(cfg, "", "tolerance", 0.05);
    range(c.tol > 0.0, "/tolerance", "must be positive");
    c.z = number(cfg, "", "z", 2.0);
    range(c.z >= 0.0, "/z", "must be nonnegative");
    return c;
}

struct TailCfg {
    EnsembleConfig ens;
    std::size_t n;
    double k;
    std::vector<double> r_grid;
    std::size_t k_order;
    std::vector<double> exponents;
    std::optional<double> expected_alpha;
};
TailCfg parse_tail(const json& cfg) {
    common_root(cfg, {"ensemble", "n", "k", "R_grid", "k_order", "exponents", "expected_alpha"});
    TailCfg t;
    t.ens = parse_ensemble(need(cfg, "", "ensemble"), "/ensemble");
    t.n = count_of(cfg, "n", 20);
    t.k = number(cfg, "", "k", 2.0);
    range(t.k > 0.0, "/k", "must be positive");
    t.r_grid = vector_of(need(cfg, "", "R_grid"), "/R_grid");
    range(!t.r_grid.empty(), "/R_grid", "must be nonempty");
    for (std::size_t i = 0; i < t.r_grid.size(); ++i) {
        range(t.r_grid[i] > 0.0, "/R_grid/" + std::to_string(i), "must be positive");
        range(i == 0 || t.r_grid[i] > t.r_grid[i - 1], "/R_grid/" + std::to_string(i), "must be increasing");
    }
    t.k_order = count_of(cfg, "k_order", 10);
    range(2 * t.k_order <= t.n, "/k_order", "must be at most n/2");
    t.exponents = vector_of(need(cfg, "", "exponents"), "/exponents");
    range(!t.exponents.empty(), "/exponents", "must be nonempty");
    for (std::size_t i = 0; i < t.exponents.size(); ++i)
        range(t.exponents[i] > 0.0, "/exponents/" + std::to_string(i), "must be positive");
    if (cfg.contains("expected_alpha")) {
        double a = number(cfg, "", "expected_alpha");
        range(a > 0.0 && a <= 2.0, "/expected_alpha", "must lie in (0,2]");
        t.expected_alpha = a;
    }
    return t;
}

// ---- commands -------------------------------------------------------------

int cmd_sample(const json& cfg, const fs::path& out, std::ostream& log, std::chrono::steady_clock::time_point t0) {
    SampleCfg c = parse_sample(cfg);
    Stream master(cfg.at("seed").get<std::uint64_t>());
    SampleBatch b = draw_ensemble(c.ens, c.n, master.child("batch"));
    write_batch(out / "batch.csv", b, {{"seed", cfg.at("seed")}, {"ensemble", cfg.at("ensemble")}});

    json res;
    auto norms = b.norms();
    res["norm_quantiles"] = {{"q50", quantile(norms, 0.5)}, {"q90", quantile(norms, 0.9)},
                             {"q99", quantile(norms, 0.99)}, {"max", quantile(norms, 1.0)}};
    auto tr = b.traces();
    std::vector<double> abs_tr(tr.size());
    std::transform(tr.begin(), tr.end(), abs_tr.begin(), [](double x) { return std::abs(x); });
    if (b.size() >= 200) {
        auto scan = moment_scan(abs_tr, {1.0, 2.0});
        json moments = json::object();
        if (!scan[0].diverging) {
            Estimate m = mean_estimate(tr);
            moments["trace_mean"] = {{"value", m.value}, {"stderr", m.std_error}};
        }
        if (!scan[1].diverging) {
            std::vector<double> sq(tr.size());
            std::transform(tr.begin(), tr.end(), sq.begin(), [](double x) { return x * x; });
            Estimate m = mean_estimate(sq);
            moments["trace_second_moment"] = {{"value", m.value}, {"stderr", m.std_error}};
        }
        res["trace_moments"] = moments;
    }
    std::vector<double> lmin(b.size()), lmax(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) lmin[i] = b.eigenvalues[i].front(), lmax[i] = b.eigenvalues[i].back();
    res["spectrum"] = {{"median_lambda_min", quantile(lmin, 0.5)}, {"median_lambda_max", quantile(lmax, 0.5)}};
    res["n"] = b.size();
    res["exact"] = b.exact;
    log << "sampled " << b.size() << " draws (" << b.sampler << ")\n";
    json summary{{"command", "sample"}, {"config", cfg}, {"results", res}, {"checks", json::array()}, {"pass", true}};
    finish(out, summary, {"batch.csv", "summary.json"}, t0);
    return kPass;
}

int cmd_cf(const json& cfg, const fs::path& out, std::ostream& log, std::chrono::steady_clock::time_point t0) {
    CfCfg c = parse_cf(cfg);
    Stream master(cfg.at("seed").get<std::uint64_t>());
    std::optional<SampleBatch> batch;
    if (c.ens) batch = draw_ensemble(*c.ens, c.n, master.child("batch"));
    Stream mc = master.child("mc");

    CsvWriter values({"point_id", "form", "re", "im", "stderr"});
    CsvWriter grid({"point_id", "s"});
    CsvWriter agree({"point_id", "form_a", "form_b", "abs_diff", "combined_stderr", "pass"});
    json checks = json::array();
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
        const auto& s = c.grid[g];
        grid.row({std::to_string(g), join_s(s)});
        std::vector<ComplexEstimate> vals;
        for (std::size_t f = 0; f < c.forms.size(); ++f) {
            const std::string& form = c.forms[f];
            Engine eng = mc.engine(g * 16 + f);
            ComplexEstimate v;
            if (form == "empirical_matrix") {
                v = empirical_cf_matrix(*batch, HermitianMatrix::diagonal(s));
            } else if (form == "empirical_diag") {
                v = empirical_cf_diag(*batch, s);
            } else if (form == "empirical_spherical") {
                v = empirical_spherical_cf(*batch, s);
            } else {
                ComplexEstimate l = form == "matrix" ? log_cf_matrix(c.spec, HermitianMatrix::diagonal(s), c.n_mc, eng)
                                    : form == "diag" ? log_cf_diag_form(c.spec, s, c.n_mc, eng)
                                                     : log_cf_eig_form(c.spec, s, c.n_mc, eng);
                v.value = std::exp(l.value);
                v.std_error = std::abs(v.value) * l.std_error;
            }
            values.row({std::to_string(g), form, fmt17(v.value.real()), fmt17(v.value.imag()), fmt17(v.std_error)});
            vals.push_back(v);
        }
        for (std::size_t a = 0; a < vals.size(); ++a)
            for (std::size_t b = a + 1; b < vals.size(); ++b) {
                double d = std::abs(vals[a].value - vals[b].value);
                double se = std::hypot(vals[a].std_error, vals[b].std_error);
                double thr = c.z * se + 1e-6;
                bool ok = d <= thr;
                agree.row({std::to_string(g), c.forms[a], c.forms[b], fmt17(d), fmt17(se), ok ? "1" : "0"});
                checks.push_back(check("point " + std::to_string(g) + " " + c.forms[a] + " vs " + c.forms[b], d, thr, ok));
            }
    }
    values.save(out / "cf.csv");
    grid.save(out / "grid.csv");
    agree.save(out / "agreement.csv");
    bool pass = all_pass(checks);
    log << "cf: " << checks.size() << " comparisons, " << (pass ? "all agree" : "disagreement found") << "\n";
    json summary{{"command", "cf"}, {"config", cfg}, {"checks", checks}, {"pass", pass}};
    finish(out, summary, {"cf.csv", "grid.csv", "agreement.csv", "summary.json"}, t0);
    return pass ? kPass : kCheckFailure;
}

int cmd_dp_check(const json& cfg, const fs::path& out, std::ostream& log, std::chrono::steady_clock::time_point t0) {
    DpCfg c = parse_dp(cfg);
    Stream master(cfg.at("seed").get<std::uint64_t>());
    SampleBatch b = draw_ensemble(c.ens, c.n, master.child("batch"));
    DpResidual r = derivative_principle_residual(b, c.grid);
    CsvWriter w({"point_id", "s", "spherical_re", "spherical_im", "diag_re", "diag_im", "residual", "stderr"});
    json checks = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        w.row({std::to_string(i), join_s(p.s), fmt17(p.spherical.real()), fmt17(p.spherical.imag()),
               fmt17(p.diagonal.real()), fmt17(p.diagonal.imag()), fmt17(p.residual), fmt17(p.std_error)});
        double thr = std::max(c.tol, 4.0 * p.std_error);
        checks.push_back(check("point " + std::to_string(i), p.residual, thr, p.residual <= thr));
    }
    w.save(out / "dp.csv");
    bool pass = all_pass(checks);
    log << "dp-check: max residual " << r.max_residual << "\n";
    json summary{{"command", "dp-check"},
                 {"config", cfg},
                 {"results", {{"max_residual", r.max_residual}}},
                 {"checks", checks},
                 {"pass", pass}};
    finish(out, summary, {"dp.csv", "summary.json"}, t0);
    return pass ? kPass : kCheckFailure;
}

int cmd_clt(const json& cfg, const fs::path& out, std::ostream& log, std::chrono::steady_clock::time_point t0) {
    CltCfg c = parse_clt(cfg);
    Stream master(cfg.at("seed").get<std::uint64_t>());
    std::size_t dim = c.src.dim;
    CltTarget t = c.target;
    json target_echo = {{"type", t.type}};
    if (t.type == "gaussian_from_source") {
        SampleBatch pilot = draw_ensemble(c.src, std::max<std::size_t>(c.setup.n, 20000), master.child("pilot-cov"));
        // Var(X_aa) = sigma^2 + kappa, Cov(X_aa, X_bb) = kappa
        double n = static_cast<double>(pilot.size()), var = 0.0, cov = 0.0;
        std::vector<double> mean(dim, 0.0);
        for (const auto& d : pilot.diagonals)
            for (std::size_t a = 0; a < dim; ++a) mean[a] += d[a] / n;
        for (const auto& d : pilot.diagonals)
            for (std::size_t a = 0; a < dim; ++a) {
                var += (d[a] - mean[a]) * (d[a] - mean[a]);
                for (std::size_t b = a + 1; b < dim; ++b) cov += (d[a] - mean[a]) * (d[b] - mean[b]);
            }
        var /= n * dim;
        cov = dim > 1 ? cov / (n * dim * (dim - 1) / 2.0) : 0.0;
        t.kappa = cov;
        t.sigma = std::sqrt(std::max(var - cov, 1e-300));
        t.alpha = 2.0;
        target_echo["sigma"] = t.sigma;
        target_echo["kappa"] = t.kappa;
    }
    double iso_c = t.type == "isotropic" ? isotropic_abs_moment(t.alpha, dim) : 0.0;
    TargetLogCf target = [&](std::span<const double> s) -> std::complex<double> {
        double ss = 0.0, tr = 0.0;
        for (double x : s) ss += x * x, tr += x;
        if (t.type == "isotropic") return -t.gamma * iso_c * std::pow(std::sqrt(ss), t.alpha);
        if (t.type == "elliptical")
            return -std::pow(t.sigma * t.sigma * ss / t.alpha + t.kappa * tr * tr / t.alpha, t.alpha / 2.0);
        return -(t.sigma * t.sigma * ss + t.kappa * tr * tr) / 2.0;
    };
    EnsembleConfig src = c.src;
    BatchSource source = [src](std::size_t n, const Stream& st) { return draw_ensemble(src, n, st); };
    ConvergenceCurve curve = clt_experiment(source, target, c.setup, master.child("clt"));

    CsvWriter w({"m", "distance", "stderr", "argmax_point"});
    for (std::size_t i = 0; i < curve.m_schedule.size(); ++i)
        w.row({std::to_string(curve.m_schedule[i]), fmt17(curve.distances[i]), fmt17(curve.std_errors[i]),
               std::to_string(curve.argmax[i])});
    w.save(out / "curve.csv");
    json checks = json::array();
    checks.push_back(check("nonincreasing within z*stderr", nonincreasing_within(curve, c.z) ? 0.0 : 1.0, c.z,
                           nonincreasing_within(curve, c.z)));
    checks.push_back(check("final distance", curve.distances.back(), c.tol, curve.distances.back() <= c.tol));
    bool pass = all_pass(checks);
    log << "clt: final distance " << curve.distances.back() << "\n";
    json summary{{"command", "clt"},
                 {"config", cfg},
                 {"results", {{"target", target_echo}, {"distances", curve.distances}, {"stderrs", curve.std_errors}}},
                 {"checks", checks},
                 {"pass", pass}};
    finish(out, summary, {"curve.csv", "summary.json"}, t0);
    return pass ? kPass : kCheckFailure;
}

int cmd_tail(const json& cfg, const fs::path& out, std::ostream& log, std::chrono::steady_clock::time_point t0) {
    TailCfg c = parse_tail(cfg);
    Stream master(cfg.at("seed").get<std::uint64_t>());
    SampleBatch b = draw_ensemble(c.ens, c.n, master.child("batch"));
    auto norms = b.norms();
    TailRatioEstimate tr = tail_ratio(norms, c.k, c.r_grid);
    HillEstimate h = hill_estimator(norms, c.k_order);
    auto scan = moment_scan(norms, c.exponents);

    CsvWriter tw({"R", "ratio", "count", "masked"});
    for (std::size_t i = 0; i < tr.r_grid.size(); ++i)
        tw.row({fmt17(tr.r_grid[i]), fmt17(tr.ratios[i]), std::to_string(tr.counts[i]), tr.masked[i] ? "1" : "0"});
    tw.save(out / "tail.csv");
    CsvWriter mw({"m", "growth_slope", "hill_index", "doubling_z", "flag"});
    json moments = json::array();
    for (const auto& e : scan) {
        mw.row({fmt17(e.m), fmt17(e.growth_slope), fmt17(e.hill_index), fmt17(e.doubling_z),
                e.diverging ? "diverging" : "finite-looking"});
        moments.push_back({{"m", e.m},
                           {"prefixes", e.prefixes},
                           {"partial_means", e.partial_means},
                           {"flag", e.diverging ? "diverging" : "finite-looking"}});
    }
    mw.save(out / "moments.csv");

    json checks = json::array();
    if (c.expected_alpha) {
        double a = *c.expected_alpha;
        auto last = last_unmasked(tr);
        double target = std::pow(c.k, -a);
        double cnt = static_cast<double>(tr.counts[*last]);
        double hw = binomial_halfwidth(target, cnt, 2.576);
        checks.push_back(check("tail ratio at largest unmasked R", tr.ratios[*last], hw,
                               std::abs(tr.ratios[*last] - target) <= hw));
        checks.push_back(check("hill index", h.alpha_hat, 3.0 * h.ci_halfwidth,
                               std::abs(h.alpha_hat - a) <= 3.0 * h.ci_halfwidth));
    }
    bool pass = all_pass(checks);
    log << "tail: hill alpha " << h.alpha_hat << "\n";
    json summary{{"command", "tail"},
                 {"config", cfg},
                 {"results",
                  {{"hill", {{"k_order", h.k_order}, {"alpha_hat", h.alpha_hat}, {"ci_halfwidth", h.ci_halfwidth}}},
                   {"moments", moments}}},
                 {"checks", checks},
                 {"pass", pass}};
    finish(out, summary, {"tail.csv", "moments.csv", "summary.json"}, t0);
    return pass ? kPass : kCheckFailure;
}

}  // namespace

void validate_config(const json& cfg, const std::string& command) {
    if (command == "sample") parse_sample(cfg);
    else if (command == "cf") parse_cf(cfg);
    else if (command == "dp-check") parse_dp(cfg);
    else if (command == "clt") parse_clt(cfg);
    else if (command == "tail") parse_tail(cfg);
    else throw ConfigError("/", "unknown command " + command);
}

int run_command(const std::string& command, const CliOptions& opt, std::ostream& log) {
    auto t0 = std::chrono::steady_clock::now();
    try {
        json cfg;
        try {
            cfg = json::parse(read_text(opt.config));
        } catch (const json::parse_error& e) {
            throw ConfigError("/", std::string("invalid JSON: ") + e.what());
        } catch (const std::runtime_error& e) {
            throw ConfigError("/", e.what());
        }
        if (opt.seed && cfg.is_object()) cfg["seed"] = *opt.seed;
        validate_config(cfg, command);
        set_threads(opt.threads);
        fs::create_directories(opt.out);
        if (command == "sample") return cmd_sample(cfg, opt.out, log, t0);
        if (command == "cf") return cmd_cf(cfg, opt.out, log, t0);
        if (command == "dp-check") return cmd_dp_check(cfg, opt.out, log, t0);
        if (command == "clt") return cmd_clt(cfg, opt.out, log, t0);
        return cmd_tail(cfg, opt.out, log, t0);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const CapabilityError& e) {
        log << "capability error: " << e.what() << "\n";
        return kCapabilityError;
    } catch (const NumericalError& e) {
        log << "numerical error: " << e.what() << "\n";
        return kCapabilityError;
    } catch (const EstimationError& e) {
        log << "numerical error: " << e.what() << "\n";
        return kCapabilityError;
    }
}

int run_report(const std::vector<fs::path>& runs, const fs::path& out, std::ostream& log) {
    if (runs.empty()) {
        log << "config error: report needs at least one run directory\n";
        return kConfigError;
    }
    json rows = json::array();
    std::string md = "# Run report\n\n| run | command | checks | result |\n|---|---|---|---|\n";
    bool all = true;
    for (const auto& r : runs) {
        json s;
        try {
            s = json::parse(read_text(r / "summary.json"));
        } catch (const std::exception& e) {
            log << "config error: " << r.string() << ": " << e.what() << "\n";
            return kConfigError;
        }
        bool pass = s.value("pass", false);
        all = all && pass;
        std::size_t nchecks = s.contains("checks") ? s["checks"].size() : 0;
        rows.push_back({{"run", r.string()}, {"command", s.value("command", "")}, {"pass", pass},
                        {"checks", s.value("checks", json::array())}});
        md += "| " + r.string() + " | " + s.value("command", "") + " | " + std::to_string(nchecks) + " | " +
              (pass ? "pass" : "FAIL") + " |\n";
    }
    fs::create_directories(out);
    write_text(out / "report.json", json{{"runs", rows}, {"pass", all}}.dump(2) + "\n");
    write_text(out / "report.md", md);
    log << "report: " << runs.size() << " runs, " << (all ? "all pass" : "failures present") << "\n";
    return all ? kPass : kCheckFailure;
}

}  // namespace rms
