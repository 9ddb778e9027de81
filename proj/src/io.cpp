#include "platoon/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace platoon {

namespace fs = std::filesystem;

namespace {

std::string fmt_g(double v, int sig_digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", sig_digits, v);
    return buf;
}

std::string fmt9(double v) { return fmt_g(v, 9); }    // CSV columns
std::string fmt17(double v) { return fmt_g(v, 17); }  // lossless config values

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const fs::path& path, int line, const std::string& msg) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": " << msg;
    throw ParseError(os.str());
}

double parse_double(const std::string& text, const fs::path& path, int line,
                    const std::string& key) {
    double out = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        fail(path, line, "key '" + key + "': cannot parse number from '" + text + "'");
    if (!std::isfinite(out))
        fail(path, line, "key '" + key + "': non-finite value '" + text + "'");
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

bool key_allowed(const std::string& section, const std::string& key) {
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"road", {"buffer_length", "control_length", "v_min", "v_max", "u_min", "u_max", "s0"}},
        {"sim",
         {"name", "t_c", "t_p", "tau_r", "eta_bar", "dt", "tanh_scale", "horizon_extra"}},
        {"tolerances", {"eps_v", "eps_delta", "dwell"}},
        {"vehicle", {"kind", "position", "rho", "alpha", "eta", "length"}},
    };
    const auto it = allowed.find(section);
    if (it == allowed.end()) return false;
    for (const std::string& k : it->second)
        if (k == key) return true;
    return false;
}

}  // namespace

void atomic_write_text(const fs::path& path, const std::string& text) {
    const fs::path dir = path.parent_path();
    std::error_code ec;
    if (!dir.empty()) fs::create_directories(dir, ec);  // best effort; open reports failure
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << text;
        out.flush();
        if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("rename failed: " + tmp.string() + " -> " + path.string() +
                                 " (" + ec.message() + ")");
}

ScenarioConfig load_scenario(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file: " + path.string());

    Section road, sim, tol;
    std::vector<Section> vehicles;
    std::map<std::string, int> singleton_seen;  // section name -> first line

    std::string raw;
    int line_no = 0;
    std::string current;  // current section name; empty before the first header
    Section* target = nullptr;

    while (std::getline(in, raw)) {
        ++line_no;
        if (const std::size_t hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(path, line_no, "malformed section header '" + line + "'");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "vehicle") {
                vehicles.emplace_back();
                target = &vehicles.back();
            } else if (name == "road" || name == "sim" || name == "tolerances") {
                if (const auto it = singleton_seen.find(name); it != singleton_seen.end())
                    fail(path, line_no,
                         "duplicate section [" + name + "] (first at line " +
                             std::to_string(it->second) + ")");
                singleton_seen[name] = line_no;
                target = name == "road" ? &road : name == "sim" ? &sim : &tol;
            } else {
                fail(path, line_no, "unknown section [" + name + "]");
            }
            current = name;
            continue;
        }

        if (!target) fail(path, line_no, "entry before any section header: '" + line + "'");
        const std::size_t sp = line.find_first_of(" \t");
        if (sp == std::string::npos)
            fail(path, line_no, "expected 'key value', got '" + line + "'");
        const std::string key = line.substr(0, sp);
        const std::string value = trim(line.substr(sp + 1));
        if (!key_allowed(current, key))
            fail(path, line_no, "unknown key '" + key + "' in [" + current + "]");
        if (const auto it = target->find(key); it != target->end())
            fail(path, line_no,
                 "duplicate key '" + key + "' (first at line " + std::to_string(it->second.line) +
                     ")");
        (*target)[key] = Entry{value, line_no};
    }

    ScenarioConfig cfg;
    cfg.name = path.stem().string();

    const auto num = [&](const Section& sec, const char* key, double fallback) {
        const auto it = sec.find(key);
        if (it == sec.end()) return fallback;
        return parse_double(it->second.value, path, it->second.line, key);
    };

    cfg.road.buffer_length = num(road, "buffer_length", cfg.road.buffer_length);
    cfg.road.control_length = num(road, "control_length", cfg.road.control_length);
    cfg.road.v_min = num(road, "v_min", cfg.road.v_min);
    cfg.road.v_max = num(road, "v_max", cfg.road.v_max);
    cfg.road.u_min = num(road, "u_min", cfg.road.u_min);
    cfg.road.u_max = num(road, "u_max", cfg.road.u_max);
    cfg.road.s0 = num(road, "s0", cfg.road.s0);

    if (const auto it = sim.find("name"); it != sim.end()) cfg.name = it->second.value;
    cfg.t_c = num(sim, "t_c", cfg.t_c);
    cfg.t_p = num(sim, "t_p", cfg.t_p);
    cfg.tau_r = num(sim, "tau_r", cfg.tau_r);
    cfg.eta_bar = num(sim, "eta_bar", cfg.eta_bar);
    cfg.dt = num(sim, "dt", cfg.dt);
    cfg.tanh_scale = num(sim, "tanh_scale", cfg.tanh_scale);
    cfg.horizon_extra = num(sim, "horizon_extra", cfg.horizon_extra);

    cfg.tolerances.eps_v = num(tol, "eps_v", cfg.tolerances.eps_v);
    cfg.tolerances.eps_delta = num(tol, "eps_delta", cfg.tolerances.eps_delta);
    cfg.tolerances.dwell = num(tol, "dwell", cfg.tolerances.dwell);

    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const Section& sec = vehicles[i];
        VehicleParams vp;
        const auto kind_it = sec.find("kind");
        if (kind_it == sec.end())
            fail(path, 0, "[vehicle] #" + std::to_string(i + 1) + ": missing required key 'kind'");
        if (kind_it->second.value == "CAV")
            vp.kind = VehicleKind::CAV;
        else if (kind_it->second.value == "HDV")
            vp.kind = VehicleKind::HDV;
        else
            fail(path, kind_it->second.line,
                 "kind must be CAV or HDV, got '" + kind_it->second.value + "'");
        const auto pos_it = sec.find("position");
        if (pos_it == sec.end())
            fail(path, 0,
                 "[vehicle] #" + std::to_string(i + 1) + ": missing required key 'position'");
        vp.rho = num(sec, "rho", vp.rho);
        vp.alpha = num(sec, "alpha", vp.alpha);
        vp.eta = num(sec, "eta", vp.eta);
        vp.length = num(sec, "length", vp.length);

        VehicleState vs;
        vs.position = parse_double(pos_it->second.value, path, pos_it->second.line, "position");
        vs.speed = cfg.road.v_max;  // scenarios start in steady flow
        vs.accel = 0.0;
        cfg.vehicles.emplace_back(vp, vs);
    }

    validate_config(cfg);
    return cfg;
}

std::string scenario_text(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "[road]\n";
    os << "buffer_length " << fmt17(cfg.road.buffer_length) << "\n";
    os << "control_length " << fmt17(cfg.road.control_length) << "\n";
    os << "v_min " << fmt17(cfg.road.v_min) << "\n";
    os << "v_max " << fmt17(cfg.road.v_max) << "\n";
    os << "u_min " << fmt17(cfg.road.u_min) << "\n";
    os << "u_max " << fmt17(cfg.road.u_max) << "\n";
    os << "s0 " << fmt17(cfg.road.s0) << "\n";
    os << "\n[sim]\n";
    os << "name " << cfg.name << "\n";
    os << "t_c " << fmt17(cfg.t_c) << "\n";
    os << "t_p " << fmt17(cfg.t_p) << "\n";
    os << "tau_r " << fmt17(cfg.tau_r) << "\n";
    os << "eta_bar " << fmt17(cfg.eta_bar) << "\n";
    os << "dt " << fmt17(cfg.dt) << "\n";
    os << "tanh_scale " << fmt17(cfg.tanh_scale) << "\n";
    os << "horizon_extra " << fmt17(cfg.horizon_extra) << "\n";
    os << "\n[tolerances]\n";
    os << "eps_v " << fmt17(cfg.tolerances.eps_v) << "\n";
    os << "eps_delta " << fmt17(cfg.tolerances.eps_delta) << "\n";
    os << "dwell " << fmt17(cfg.tolerances.dwell) << "\n";
    for (const auto& [vp, vs] : cfg.vehicles) {
        os << "\n[vehicle]\n";
        os << "kind " << (vp.kind == VehicleKind::CAV ? "CAV" : "HDV") << "\n";
        os << "position " << fmt17(vs.position) << "\n";
        os << "rho " << fmt17(vp.rho) << "\n";
        os << "alpha " << fmt17(vp.alpha) << "\n";
        os << "eta " << fmt17(vp.eta) << "\n";
        os << "length " << fmt17(vp.length) << "\n";
    }
    return os.str();
}

void write_scenario(const ScenarioConfig& cfg, const fs::path& path) {
    atomic_write_text(path, scenario_text(cfg));
}

std::string scenario_hash(const ScenarioConfig& cfg) {
    const std::string text = scenario_text(cfg);
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a 64-bit
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunSummary make_summary(const ScenarioConfig& cfg, const ControlPlan& plan,
                        const FormationReport& formation) {
    RunSummary s;
    s.scenario_name = cfg.name;
    s.scenario_hash_hex = scenario_hash(cfg);
    s.dt = cfg.dt;
    s.plan = plan;
    s.tolerances = cfg.tolerances;
    s.formation = formation;
    return s;
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

std::optional<double> json_opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["version"] = s.version;
    j["scenario"] = {{"name", s.scenario_name}, {"hash", s.scenario_hash_hex}};
    j["dt"] = s.dt;
    j["plan"] = {{"u_p", s.plan.u_p},
                 {"t_c", s.plan.t_c},
                 {"t_s", s.plan.t_s},
                 {"t_f", s.plan.t_f},
                 {"tau_t", s.plan.tau_t},
                 {"tau_s", s.plan.tau_s},
                 {"t_p", s.plan.t_p()},
                 {"v_eq_planned", s.plan.v_eq_planned},
                 {"cumulative_gap", s.plan.gap_solved},
                 {"rho_sum", s.plan.rho_sum},
                 {"feasible_interval",
                  {s.plan.feasible_interval.first, s.plan.feasible_interval.second}}};
    j["tolerances"] = {{"eps_v", s.tolerances.eps_v},
                       {"eps_delta", s.tolerances.eps_delta},
                       {"dwell", s.tolerances.dwell}};
    j["formation"] = {{"reached", s.formation.t_ap.has_value()},
                      {"t_s_actual", opt_json(s.formation.t_s_actual)},
                      {"t_ap", opt_json(s.formation.t_ap)},
                      {"deviation_pct", opt_json(s.formation.deviation_pct)},
                      {"v_eq_observed", opt_json(s.formation.v_eq_observed)},
                      {"in_zone", s.formation.in_zone},
                      {"not_reached_reason", s.formation.not_reached_reason}};
    return j.dump(2) + "\n";
}

RunSummary parse_summary(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    RunSummary s;
    s.version = j.at("version").get<std::string>();
    s.scenario_name = j.at("scenario").at("name").get<std::string>();
    s.scenario_hash_hex = j.at("scenario").at("hash").get<std::string>();
    s.dt = j.at("dt").get<double>();
    const auto& p = j.at("plan");
    s.plan.u_p = p.at("u_p").get<double>();
    s.plan.t_c = p.at("t_c").get<double>();
    s.plan.t_s = p.at("t_s").get<double>();
    s.plan.t_f = p.at("t_f").get<double>();
    s.plan.tau_t = p.at("tau_t").get<double>();
    s.plan.tau_s = p.at("tau_s").get<double>();
    s.plan.v_eq_planned = p.at("v_eq_planned").get<double>();
    s.plan.gap_solved = p.at("cumulative_gap").get<double>();
    s.plan.rho_sum = p.at("rho_sum").get<double>();
    s.plan.feasible_interval = {p.at("feasible_interval").at(0).get<double>(),
                                p.at("feasible_interval").at(1).get<double>()};
    const auto& t = j.at("tolerances");
    s.tolerances.eps_v = t.at("eps_v").get<double>();
    s.tolerances.eps_delta = t.at("eps_delta").get<double>();
    s.tolerances.dwell = t.at("dwell").get<double>();
    const auto& f = j.at("formation");
    s.formation.t_s_actual = json_opt(f.at("t_s_actual"));
    s.formation.t_ap = json_opt(f.at("t_ap"));
    s.formation.deviation_pct = json_opt(f.at("deviation_pct"));
    s.formation.v_eq_observed = json_opt(f.at("v_eq_observed"));
    s.formation.in_zone = f.at("in_zone").get<bool>();
    s.formation.not_reached_reason = f.at("not_reached_reason").get<std::string>();
    return s;
}

void write_summary(const RunSummary& s, const fs::path& path) {
    atomic_write_text(path, summary_json(s));
}

void write_trajectory(const Trajectory& traj, const ScenarioConfig& cfg, const fs::path& path) {
    if (traj.fleet() != cfg.vehicles.size())
        throw std::invalid_argument("write_trajectory: trajectory/config fleet size mismatch");
    std::string out;
    out.reserve(64 * traj.steps() * traj.fleet() + 64);
    out += "t,vehicle_id,kind,p,v,u,s_i,delta_i,headway,phase\n";
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        for (std::size_t i = 0; i < traj.fleet(); ++i) {
            const VehicleKind kind = cfg.vehicles[i].first.kind;
            out += fmt9(traj.t[k]);
            out += ',';
            out += std::to_string(i + 1);
            out += ',';
            out += kind == VehicleKind::CAV ? "CAV" : "HDV";
            out += ',';
            out += fmt9(traj.p[i][k]);
            out += ',';
            out += fmt9(traj.v[i][k]);
            out += ',';
            out += fmt9(traj.u[i][k]);
            out += ',';
            out += fmt9(traj.s[i][k]);
            out += ',';
            if (!std::isnan(traj.delta[i][k])) out += fmt9(traj.delta[i][k]);
            out += ',';
            if (!std::isnan(traj.headway[i][k])) out += fmt9(traj.headway[i][k]);
            out += ',';
            out += phase_name(traj.phase[k]);
            out += '\n';
        }
    }
    atomic_write_text(path, out);
}

std::string plot_data_text(const std::vector<SweepRecord>& records) {
    std::string out = "axis_value,N,deviation_pct,feasible\n";
    for (const SweepRecord& r : records) {
        out += fmt9(r.axis_value);
        out += ',';
        out += std::to_string(r.N);
        out += ',';
        if (r.deviation_pct) out += fmt9(*r.deviation_pct);
        out += ',';
        out += r.verdict == "feasible" ? '1' : '0';
        out += '\n';
    }
    return out;
}

void emit_plot_data(const std::vector<SweepRecord>& records, const fs::path& path) {
    atomic_write_text(path, plot_data_text(records));
}

}  // namespace platoon
