#include "sds/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace sds {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::map<std::string, std::vector<std::string>>& known_keys()
{
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"model", {"N", "m", "a", "G", "g0"}},
        {"centers", {"point"}},
        {"grid", {"R", "n"}},
        {"delta", {"schedule"}},
        {"solver", {"tol", "max_iterations"}},
        {"radial", {"t0", "t_end", "step", "fit_window", "seed_tol"}},
        {"sweep", {"N_values", "m_values"}},
        {"output", {"directory", "basename"}},
        {"verify", {"artifact"}},
    };
    return keys;
}

std::string list_of(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items)
        out += (out.empty() ? "" : ", ") + s;
    return out;
}

std::string section_list()
{
    std::string out;
    for (const auto& [name, _] : known_keys())
        out += (out.empty() ? "" : ", ") + name;
    return out;
}

struct Entry {
    std::string section;
    std::string key;
    std::vector<std::string> values;
    int line = 0;
};

std::vector<Entry> tokenize(const std::string& text)
{
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok)
            toks.push_back(tok);
        if (toks.empty())
            continue;
        if (toks.size() == 2 && toks[1] == "{") {
            if (!section.empty())
                throw config_error("config line " + std::to_string(lineno) +
                                   ": nested sections are not supported");
            section = toks[0];
            if (!known_keys().count(section))
                throw config_error("config line " + std::to_string(lineno) +
                                   ": unknown section '" + section +
                                   "'; valid sections: " + section_list());
            continue;
        }
        if (toks.size() == 1 && toks[0] == "}") {
            if (section.empty())
                throw config_error("config line " + std::to_string(lineno) +
                                   ": '}' without an open section");
            section.clear();
            continue;
        }
        if (section.empty())
            throw config_error("config line " + std::to_string(lineno) +
                               ": entries must appear inside a section");
        if (toks.size() < 3 || toks[1] != "=")
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value...'");
        const auto& valid = known_keys().at(section);
        if (std::find(valid.begin(), valid.end(), toks[0]) == valid.end())
            throw config_error("config line " + std::to_string(lineno) + ": unknown key '" +
                               toks[0] + "' in section '" + section +
                               "'; valid keys: " + list_of(valid));
        Entry e;
        e.section = section;
        e.key = toks[0];
        e.values.assign(toks.begin() + 2, toks.end());
        e.line = lineno;
        entries.push_back(std::move(e));
    }
    if (!section.empty())
        throw config_error("config: unterminated section '" + section + "'");
    return entries;
}

double parse_real(const Entry& e, const std::string& tok)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size())
            throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config line " + std::to_string(e.line) + ": '" + tok +
                           "' is not a number (key " + e.key + ")");
    }
}

int parse_int(const Entry& e, const std::string& tok)
{
    const double v = parse_real(e, tok);
    if (v != std::floor(v))
        throw config_error("config line " + std::to_string(e.line) + ": key " + e.key +
                           " expects an integer");
    return static_cast<int>(v);
}

double single_real(const Entry& e)
{
    if (e.values.size() != 1)
        throw config_error("config line " + std::to_string(e.line) + ": key " + e.key +
                           " expects one value");
    return parse_real(e, e.values[0]);
}

} // namespace

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int JobConfig::total_N() const
{
    if (N)
        return *N;
    int sum = 0;
    for (const auto& c : centers)
        sum += c.multiplicity;
    return sum;
}

bool JobConfig::operator==(const JobConfig& other) const
{
    auto centers_equal = [&] {
        if (centers.size() != other.centers.size())
            return false;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            if (centers[i].position.x != other.centers[i].position.x ||
                centers[i].position.y != other.centers[i].position.y ||
                centers[i].multiplicity != other.centers[i].multiplicity)
                return false;
        }
        return true;
    };
    return N == other.N && m == other.m && a == other.a && g0 == other.g0 &&
           centers_equal() && grid_R == other.grid_R && grid_n == other.grid_n &&
           delta_schedule == other.delta_schedule && tol == other.tol &&
           max_iterations == other.max_iterations && t0 == other.t0 &&
           t_end == other.t_end && step == other.step && seed_tol == other.seed_tol &&
           fit_window == other.fit_window && sweep_N == other.sweep_N &&
           sweep_m == other.sweep_m && out_dir == other.out_dir &&
           basename == other.basename && verify_artifact == other.verify_artifact;
}

JobConfig parse_config(const std::string& text)
{
    JobConfig cfg;
    std::vector<StringCenter> raw_centers;
    bool saw_a = false, saw_G = false;
    for (const Entry& e : tokenize(text)) {
        if (e.section == "model") {
            if (e.key == "N")
                cfg.N = parse_int(e, e.values[0]);
            else if (e.key == "m")
                cfg.m = single_real(e);
            else if (e.key == "a") {
                cfg.a = single_real(e);
                saw_a = true;
            } else if (e.key == "G") {
                cfg.a = 8.0 * kPi * single_real(e);
                saw_G = true;
            } else if (e.key == "g0") {
                if (e.values[0] == "auto")
                    cfg.g0.reset();
                else
                    cfg.g0 = single_real(e);
            }
        } else if (e.section == "centers") {
            if (e.values.size() != 3)
                throw config_error("config line " + std::to_string(e.line) +
                                   ": point expects 'x y multiplicity'");
            StringCenter c;
            c.position.x = parse_real(e, e.values[0]);
            c.position.y = parse_real(e, e.values[1]);
            c.multiplicity = parse_int(e, e.values[2]);
            raw_centers.push_back(c);
        } else if (e.section == "grid") {
            if (e.key == "R")
                cfg.grid_R = single_real(e);
            else
                cfg.grid_n = parse_int(e, e.values[0]);
        } else if (e.section == "delta") {
            if (e.values.size() == 1 && e.values[0] == "default") {
                cfg.delta_schedule.reset();
            } else {
                std::vector<double> sched;
                for (const auto& tok : e.values)
                    sched.push_back(parse_real(e, tok));
                cfg.delta_schedule = std::move(sched);
            }
        } else if (e.section == "solver") {
            if (e.key == "tol")
                cfg.tol = single_real(e);
            else
                cfg.max_iterations = parse_int(e, e.values[0]);
        } else if (e.section == "radial") {
            if (e.key == "t0") {
                if (e.values[0] == "auto")
                    cfg.t0.reset();
                else
                    cfg.t0 = single_real(e);
            } else if (e.key == "t_end")
                cfg.t_end = single_real(e);
            else if (e.key == "step")
                cfg.step = single_real(e);
            else if (e.key == "seed_tol")
                cfg.seed_tol = single_real(e);
            else if (e.key == "fit_window") {
                if (e.values.size() == 1 && e.values[0] == "auto")
                    cfg.fit_window.reset();
                else if (e.values.size() == 2)
                    cfg.fit_window = std::make_pair(parse_real(e, e.values[0]),
                                                    parse_real(e, e.values[1]));
                else
                    throw config_error("config line " + std::to_string(e.line) +
                                       ": fit_window expects 'auto' or 't_lo t_hi'");
            }
        } else if (e.section == "sweep") {
            if (e.key == "N_values")
                for (const auto& tok : e.values)
                    cfg.sweep_N.push_back(parse_int(e, tok));
            else
                for (const auto& tok : e.values)
                    cfg.sweep_m.push_back(parse_real(e, tok));
        } else if (e.section == "output") {
            if (e.values.size() != 1)
                throw config_error("config line " + std::to_string(e.line) + ": key " +
                                   e.key + " expects one value");
            if (e.key == "directory")
                cfg.out_dir = e.values[0];
            else
                cfg.basename = e.values[0];
        } else if (e.section == "verify") {
            if (e.values.size() != 1)
                throw config_error("config line " + std::to_string(e.line) +
                                   ": artifact expects one value");
            cfg.verify_artifact = e.values[0];
        }
    }

    if (saw_a && saw_G)
        throw config_error("config: give either model.a or model.G, not both");

    // duplicate centers merge into one entry with summed multiplicity
    if (!raw_centers.empty())
        cfg.centers = StringConfiguration(raw_centers).centers();

    if (!(cfg.m > 0.0))
        throw config_error("config: model.m must be positive");
    if (cfg.a && (*cfg.a < 0.0))
        throw config_error("config: model.a must be >= 0");
    if (cfg.g0 && !(*cfg.g0 > 0.0))
        throw config_error("config: model.g0 must be positive");
    if (cfg.N && *cfg.N < 0)
        throw config_error("config: model.N must be >= 0");
    if (cfg.N && !cfg.centers.empty()) {
        int sum = 0;
        for (const auto& c : cfg.centers)
            sum += c.multiplicity;
        if (sum != *cfg.N)
            throw config_error("config: model.N = " + std::to_string(*cfg.N) +
                               " does not match the center multiplicities (sum " +
                               std::to_string(sum) + ")");
    }
    if (!(cfg.grid_R > 0.0))
        throw config_error("config: grid.R must be positive");
    if (cfg.grid_n < 3)
        throw config_error("config: grid.n must be at least 3");
    if (!(cfg.tol > 0.0))
        throw config_error("config: solver.tol must be positive");
    if (cfg.max_iterations < 1)
        throw config_error("config: solver.max_iterations must be >= 1");
    if (!(cfg.step > 0.0))
        throw config_error("config: radial.step must be positive");
    if (!(cfg.seed_tol > 0.0))
        throw config_error("config: radial.seed_tol must be positive");
    if (cfg.delta_schedule) {
        double prev = 1.0;
        for (double d : *cfg.delta_schedule) {
            if (!(d > 0.0) || !(d < 1.0) || !(d < prev))
                throw config_error("config: delta.schedule must be strictly decreasing "
                                   "within (0, 1)");
            prev = d;
        }
        if (cfg.delta_schedule->empty())
            throw config_error("config: delta.schedule must be nonempty");
    }
    for (int n : cfg.sweep_N)
        if (n < 1)
            throw config_error("config: sweep.N_values must be >= 1");
    for (double mv : cfg.sweep_m)
        if (!(mv > 0.0))
            throw config_error("config: sweep.m_values must be positive");

    // existence regime gate
    const int N = cfg.total_N();
    if (cfg.a && *cfg.a * N > 1.0 + 1e-12)
        throw regime_error("config: a*N = " + std::to_string(*cfg.a * N) +
                           " exceeds 1; no solution in this regime");
    return cfg;
}

JobConfig load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const JobConfig& cfg)
{
    std::ostringstream out;
    out << "model {\n";
    if (cfg.N)
        out << "  N = " << *cfg.N << "\n";
    out << "  m = " << fmt17(cfg.m) << "\n";
    if (cfg.a)
        out << "  a = " << fmt17(*cfg.a) << "\n";
    out << "  g0 = " << (cfg.g0 ? fmt17(*cfg.g0) : "auto") << "\n";
    out << "}\n";
    if (!cfg.centers.empty()) {
        out << "centers {\n";
        for (const auto& c : cfg.centers)
            out << "  point = " << fmt17(c.position.x) << " " << fmt17(c.position.y) << " "
                << c.multiplicity << "\n";
        out << "}\n";
    }
    out << "grid {\n  R = " << fmt17(cfg.grid_R) << "\n  n = " << cfg.grid_n << "\n}\n";
    out << "delta {\n  schedule =";
    if (cfg.delta_schedule)
        for (double d : *cfg.delta_schedule)
            out << " " << fmt17(d);
    else
        out << " default";
    out << "\n}\n";
    out << "solver {\n  tol = " << fmt17(cfg.tol)
        << "\n  max_iterations = " << cfg.max_iterations << "\n}\n";
    out << "radial {\n  t0 = " << (cfg.t0 ? fmt17(*cfg.t0) : "auto")
        << "\n  t_end = " << fmt17(cfg.t_end) << "\n  step = " << fmt17(cfg.step)
        << "\n  seed_tol = " << fmt17(cfg.seed_tol) << "\n  fit_window = ";
    if (cfg.fit_window)
        out << fmt17(cfg.fit_window->first) << " " << fmt17(cfg.fit_window->second);
    else
        out << "auto";
    out << "\n}\n";
    if (!cfg.sweep_N.empty() || !cfg.sweep_m.empty()) {
        out << "sweep {\n";
        if (!cfg.sweep_N.empty()) {
            out << "  N_values =";
            for (int n : cfg.sweep_N)
                out << " " << n;
            out << "\n";
        }
        if (!cfg.sweep_m.empty()) {
            out << "  m_values =";
            for (double mv : cfg.sweep_m)
                out << " " << fmt17(mv);
            out << "\n";
        }
        out << "}\n";
    }
    out << "output {\n  directory = " << cfg.out_dir << "\n  basename = " << cfg.basename
        << "\n}\n";
    if (!cfg.verify_artifact.empty())
        out << "verify {\n  artifact = " << cfg.verify_artifact << "\n}\n";
    return out.str();
}

} // namespace sds
