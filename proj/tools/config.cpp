#include "config.hpp"

#include "kakinuma/errors.hpp"
#include "kakinuma/consistency.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace lab {

using kakinuma::ConfigError;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKnown = {
    {"params", {"rho1", "h1", "delta", "deltas"}},
    {"spec", {"N", "case"}},
    {"grid", {"M", "length", "P_reference"}},
    {"initial", {"zeta_cos", "zeta_sin", "phi_cos", "phi_sin", "b_cos", "b_sin"}},
    {"run", {"T", "dt", "output_stride", "halt_on_instability", "c_stab", "energy_order",
             "snapshot_stride"}},
    {"output", {"directory", "formats"}},
    {"sweep", {"Ns", "zeta_amp", "b_amp", "phi_amp", "M", "P", "P_max", "M_max", "M_flat",
               "floor", "residuals", "hamiltonian"}},
    {"dispersion", {"xi", "Ns", "floor"}},
    {"stability", {"samples", "modes"}},
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : source_(std::move(source)) {
        std::istringstream is(text);
        try {
            pt::read_ini(is, tree_);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError(source_ + ":" + std::to_string(e.line()) + ": " + e.message());
        }
        // property_tree drops line numbers, so index them separately
        std::istringstream ls(text);
        std::string line, section;
        for (int n = 1; std::getline(ls, line); ++n) {
            boost::trim(line);
            if (line.empty() || line[0] == ';' || line[0] == '#') continue;
            if (line.front() == '[') {
                section = boost::trim_copy(line.substr(1, line.find(']') - 1));
                lines_[section] = n;
                continue;
            }
            const auto eq = line.find('=');
            if (eq != std::string::npos) lines_[section + "." + boost::trim_copy(line.substr(0, eq))] = n;
        }
        for (const auto& [sec, sub] : tree_) {
            if (sub.empty() && !sub.data().empty())
                fail(sec, "", "key outside any section");
            const auto it = kKnown.find(sec);
            if (it == kKnown.end()) fail(sec, "", "unknown section");
            for (const auto& [key, val] : sub)
                if (!it->second.count(key)) fail(sec, key, "unknown field");
        }
    }

    [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const {
        std::ostringstream os;
        os << source_;
        const auto it = lines_.find(key.empty() ? sec : sec + "." + key);
        if (it != lines_.end()) os << ":" << it->second;
        os << ": [" << sec << "]";
        if (!key.empty()) os << " " << key;
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    const std::string* raw(const std::string& sec, const std::string& key) const {
        const auto s = tree_.find(sec);
        if (s == tree_.not_found()) return nullptr;
        const auto k = s->second.find(key);
        if (k == s->second.not_found()) return nullptr;
        return &k->second.data();
    }

    bool has(const std::string& sec, const std::string& key) const { return raw(sec, key) != nullptr; }

    void require(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) fail(sec, key, "required field missing");
    }

    double to_double(const std::string& sec, const std::string& key, std::string s) const {
        boost::trim(s);
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
            fail(sec, key, "expected a finite number, got '" + s + "'");
        return v;
    }

    int to_int(const std::string& sec, const std::string& key, std::string s) const {
        boost::trim(s);
        int v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
            fail(sec, key, "expected an integer, got '" + s + "'");
        return v;
    }

    std::vector<std::string> items(const std::string& s) const {
        std::vector<std::string> out;
        std::string t = boost::trim_copy(s);
        if (t.empty()) return out;
        boost::split(out, t, boost::is_any_of(","));
        for (auto& x : out) boost::trim(x);
        return out;
    }

    void get(const std::string& sec, const std::string& key, double& v) const {
        if (const auto* r = raw(sec, key)) v = to_double(sec, key, *r);
    }
    void get(const std::string& sec, const std::string& key, int& v) const {
        if (const auto* r = raw(sec, key)) v = to_int(sec, key, *r);
    }
    void get(const std::string& sec, const std::string& key, bool& v) const {
        const auto* r = raw(sec, key);
        if (!r) return;
        const std::string s = boost::to_lower_copy(boost::trim_copy(*r));
        if (s == "true" || s == "yes" || s == "1") v = true;
        else if (s == "false" || s == "no" || s == "0") v = false;
        else fail(sec, key, "expected true or false, got '" + *r + "'");
    }
    void get(const std::string& sec, const std::string& key, std::string& v) const {
        if (const auto* r = raw(sec, key)) v = boost::trim_copy(*r);
    }
    void get(const std::string& sec, const std::string& key, std::vector<double>& v) const {
        const auto* r = raw(sec, key);
        if (!r) return;
        v.clear();
        for (const auto& x : items(*r)) v.push_back(to_double(sec, key, x));
    }
    void get(const std::string& sec, const std::string& key, std::vector<int>& v) const {
        const auto* r = raw(sec, key);
        if (!r) return;
        v.clear();
        for (const auto& x : items(*r)) v.push_back(to_int(sec, key, x));
    }
    void get(const std::string& sec, const std::string& key, std::vector<std::string>& v) const {
        if (const auto* r = raw(sec, key)) v = items(*r);
    }
    void get(const std::string& sec, const std::string& key, ModeList& v) const {
        const auto* r = raw(sec, key);
        if (!r) return;
        v.clear();
        for (const auto& x : items(*r)) {
            const auto colon = x.find(':');
            if (colon == std::string::npos) fail(sec, key, "expected k:amplitude pairs, got '" + x + "'");
            v.emplace_back(to_int(sec, key, x.substr(0, colon)), to_double(sec, key, x.substr(colon + 1)));
        }
    }

private:
    std::string source_;
    pt::ptree tree_;
    std::map<std::string, int> lines_;
};

void check(const Reader& r, bool ok, const std::string& sec, const std::string& key, const std::string& msg) {
    if (!ok) r.fail(sec, key, msg);
}

}  // namespace

double RunConfig::grid_length() const { return length > 0.0 ? length : 2.0 * std::numbers::pi; }

bool RunConfig::wants(const std::string& format) const {
    for (const auto& f : formats)
        if (f == format) return true;
    return false;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
    const Reader r(text, source);
    RunConfig c;
    c.deltas = kakinuma::default_delta_sweep();

    r.require("params", "rho1");
    r.require("params", "h1");
    r.require("spec", "N");
    r.require("spec", "case");
    r.get("params", "rho1", c.rho1);
    r.get("params", "h1", c.h1);
    r.get("params", "delta", c.delta);
    r.get("params", "deltas", c.deltas);
    r.get("spec", "N", c.N);
    r.get("spec", "case", c.hyp);
    r.get("grid", "M", c.M);
    r.get("grid", "length", c.length);
    r.get("grid", "P_reference", c.P_reference);
    for (auto [key, list] : {std::pair{"zeta_cos", &c.zeta_cos}, {"zeta_sin", &c.zeta_sin},
                             {"phi_cos", &c.phi_cos}, {"phi_sin", &c.phi_sin},
                             {"b_cos", &c.b_cos}, {"b_sin", &c.b_sin}}) {
        r.get("initial", key, *list);
        for (const auto& [k, a] : *list)
            check(r, k >= 1 && k < c.M / 2, "initial", key,
                  "wavenumber index " + std::to_string(k) + " is not resolved by M = " + std::to_string(c.M));
    }
    r.get("run", "T", c.T);
    r.get("run", "dt", c.dt);
    r.get("run", "output_stride", c.output_stride);
    r.get("run", "halt_on_instability", c.halt_on_instability);
    r.get("run", "c_stab", c.c_stab);
    r.get("run", "energy_order", c.energy_order);
    r.get("run", "snapshot_stride", c.snapshot_stride);
    r.get("output", "directory", c.directory);
    r.get("output", "formats", c.formats);
    r.get("sweep", "Ns", c.sweep_Ns);
    r.get("sweep", "zeta_amp", c.zeta_amp);
    r.get("sweep", "b_amp", c.b_amp);
    r.get("sweep", "phi_amp", c.phi_amp);
    r.get("sweep", "M", c.sweep_M);
    r.get("sweep", "P", c.sweep_P);
    r.get("sweep", "P_max", c.sweep_P_max);
    r.get("sweep", "M_max", c.sweep_M_max);
    r.get("sweep", "M_flat", c.sweep_M_flat);
    r.get("sweep", "floor", c.floor);
    r.get("sweep", "residuals", c.residuals);
    r.get("sweep", "hamiltonian", c.hamiltonian);
    r.get("dispersion", "xi", c.xi);
    r.get("dispersion", "Ns", c.dispersion_Ns);
    r.get("dispersion", "floor", c.dispersion_floor);
    r.get("stability", "samples", c.samples);
    r.get("stability", "modes", c.perturbation_modes);

    try {
        kakinuma::validate_params(c.rho1, c.h1, c.delta);
    } catch (const kakinuma::ConstraintViolation& e) {
        r.fail("params", r.has("params", "delta") ? "delta" : "h1", e.what());
    }
    check(r, !c.deltas.empty(), "params", "deltas", "empty delta list");
    for (std::size_t i = 0; i < c.deltas.size(); ++i) {
        check(r, i == 0 || c.deltas[i] < c.deltas[i - 1], "params", "deltas", "deltas must be strictly decreasing");
        try {
            kakinuma::validate_params(c.rho1, c.h1, c.deltas[i]);
        } catch (const kakinuma::ConstraintViolation& e) {
            r.fail("params", "deltas", "delta = " + fmt(c.deltas[i]) + ": " + e.what());
        }
    }
    check(r, c.N >= 0, "spec", "N", "expansion order must be nonnegative");
    try {
        c.hyp = kakinuma::to_string(kakinuma::parse_hypothesis(c.hyp));
    } catch (const ConfigError& e) {
        r.fail("spec", "case", e.what());
    }
    auto pow2 = [](int m) { return m >= 16 && (m & (m - 1)) == 0; };
    check(r, pow2(c.M), "grid", "M", "must be a power of two and at least 16");
    check(r, c.length >= 0.0, "grid", "length", "must be positive");
    check(r, c.P_reference >= 4, "grid", "P_reference", "must be at least 4");
    check(r, c.T >= 0.0, "run", "T", "must be nonnegative");
    check(r, c.dt > 0.0, "run", "dt", "must be positive");
    check(r, c.output_stride >= 1, "run", "output_stride", "must be at least 1");
    check(r, c.c_stab > 0.0, "run", "c_stab", "must be positive");
    check(r, c.energy_order >= 0, "run", "energy_order", "must be nonnegative");
    check(r, c.snapshot_stride >= 0, "run", "snapshot_stride", "must be nonnegative");
    check(r, !c.directory.empty(), "output", "directory", "must not be empty");
    for (const auto& f : c.formats)
        check(r, f == "csv" || f == "json", "output", "formats", "unknown format '" + f + "' (csv, json)");
    check(r, !c.sweep_Ns.empty(), "sweep", "Ns", "empty list");
    for (int n : c.sweep_Ns) check(r, n >= 0, "sweep", "Ns", "orders must be nonnegative");
    check(r, pow2(c.sweep_M), "sweep", "M", "must be a power of two and at least 16");
    check(r, pow2(c.sweep_M_flat), "sweep", "M_flat", "must be a power of two and at least 16");
    check(r, c.sweep_M_max >= c.sweep_M, "sweep", "M_max", "must be at least M");
    check(r, c.sweep_P >= 4, "sweep", "P", "must be at least 4");
    check(r, c.sweep_P_max >= c.sweep_P, "sweep", "P_max", "must be at least P");
    check(r, c.floor >= 0.0, "sweep", "floor", "must be nonnegative");
    check(r, !c.xi.empty(), "dispersion", "xi", "empty list");
    for (double x : c.xi) check(r, x > 0.0, "dispersion", "xi", "wavenumbers must be positive");
    check(r, !c.dispersion_Ns.empty(), "dispersion", "Ns", "empty list");
    for (int n : c.dispersion_Ns) check(r, n >= 0, "dispersion", "Ns", "orders must be nonnegative");
    check(r, c.dispersion_floor >= 0.0, "dispersion", "floor", "must be nonnegative");
    check(r, c.samples >= 1, "stability", "samples", "must be at least 1");
    check(r, c.perturbation_modes >= 1 && c.perturbation_modes < c.M / 2, "stability", "modes",
          "must lie in [1, M/2)");
    return c;
}

std::string to_ini(const RunConfig& c) {
    auto join = [](const auto& v, auto f) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
        return s;
    };
    auto num = [](double x) { return fmt(x); };
    auto integer = [](int x) { return std::to_string(x); };
    auto modes = [&](const ModeList& m) {
        return join(m, [](const std::pair<int, double>& p) { return std::to_string(p.first) + ":" + fmt(p.second); });
    };
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

    std::ostringstream os;
    os << "[params]\nrho1 = " << fmt(c.rho1) << "\nh1 = " << fmt(c.h1) << "\ndelta = " << fmt(c.delta)
       << "\ndeltas = " << join(c.deltas, num) << "\n\n";
    os << "[spec]\nN = " << c.N << "\ncase = " << c.hyp << "\n\n";
    os << "[grid]\nM = " << c.M << "\nlength = " << fmt(c.grid_length()) << "\nP_reference = " << c.P_reference
       << "\n\n";
    os << "[initial]\nzeta_cos = " << modes(c.zeta_cos) << "\nzeta_sin = " << modes(c.zeta_sin)
       << "\nphi_cos = " << modes(c.phi_cos) << "\nphi_sin = " << modes(c.phi_sin)
       << "\nb_cos = " << modes(c.b_cos) << "\nb_sin = " << modes(c.b_sin) << "\n\n";
    os << "[run]\nT = " << fmt(c.T) << "\ndt = " << fmt(c.dt) << "\noutput_stride = " << c.output_stride
       << "\nhalt_on_instability = " << flag(c.halt_on_instability) << "\nc_stab = " << fmt(c.c_stab)
       << "\nenergy_order = " << c.energy_order << "\nsnapshot_stride = " << c.snapshot_stride << "\n\n";
    os << "[output]\ndirectory = " << c.directory << "\nformats = "
       << join(c.formats, [](const std::string& s) { return s; }) << "\n\n";
    os << "[sweep]\nNs = " << join(c.sweep_Ns, integer) << "\nzeta_amp = " << fmt(c.zeta_amp)
       << "\nb_amp = " << fmt(c.b_amp) << "\nphi_amp = " << fmt(c.phi_amp) << "\nM = " << c.sweep_M
       << "\nP = " << c.sweep_P << "\nP_max = " << c.sweep_P_max << "\nM_max = " << c.sweep_M_max
       << "\nM_flat = " << c.sweep_M_flat << "\nfloor = " << fmt(c.floor)
       << "\nresiduals = " << flag(c.residuals) << "\nhamiltonian = " << flag(c.hamiltonian) << "\n\n";
    os << "[dispersion]\nxi = " << join(c.xi, num) << "\nNs = " << join(c.dispersion_Ns, integer)
       << "\nfloor = " << fmt(c.dispersion_floor) << "\n\n";
    os << "[stability]\nsamples = " << c.samples << "\nmodes = " << c.perturbation_modes << "\n";
    return os.str();
}

}  // namespace lab
