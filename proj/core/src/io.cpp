#include "mtd/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <sstream>

namespace mtd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_or_throw(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw DomainError(std::string(what) + " JSON: " + e.what());
    }
}

template <typename Error, typename F>
auto with_context(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(std::string(what) + ": " + e.what());
    }
}

}  // namespace

DomainInfo domain_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "domain");
    return with_context<DomainError>("domain", [&] {
        std::vector<FactorSpec> factors;
        for (const auto& f : j.at("factors"))
            factors.push_back({f.at("name").get<std::string>(), f.at("values").get<std::vector<std::string>>()});
        ConfigSpace space(std::move(factors));
        const std::size_t n = space.size();

        std::vector<AttackerTypeSpec> types;
        for (const auto& t : j.at("attacker_types")) {
            AttackerTypeSpec spec{t.at("id").get<std::string>(), t.value("unknown", false),
                                  std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
            if (t.contains("mu"))
                for (const auto& [label, v] : t.at("mu").items()) spec.mu[space.parse(label).index] = v.get<double>();
            if (t.contains("loss"))
                for (const auto& [label, v] : t.at("loss").items())
                    spec.loss[space.parse(label).index] = v.get<double>();
            types.push_back(std::move(spec));
        }

        std::vector<double> sc(n * n, -1.0);
        for (const auto& [s_label, row] : j.at("switching_cost").items()) {
            const Config s = space.parse(s_label);
            for (const auto& [a_label, v] : row.items()) sc[s.index * n + space.parse(a_label).index] = v.get<double>();
        }
        for (std::size_t i = 0; i < sc.size(); ++i) {
            if (sc[i] < 0.0)
                throw DomainError("switching_cost is missing (" + space.label(Config{i / n}) + ", " +
                                  space.label(Config{i % n}) + ")");
        }
        return DomainInfo(std::move(space), std::move(types), std::move(sc), j.at("M").get<double>(),
                          j.at("gamma").get<double>(), j.value("alpha", 1.0));
    });
}

std::string domain_to_json(const DomainInfo& domain) {
    const auto& space = domain.space();
    const std::size_t n = space.size();
    ordered_json j;
    j["factors"] = ordered_json::array();
    for (const auto& f : space.factors()) j["factors"].push_back({{"name", f.name}, {"values", f.values}});
    j["attacker_types"] = ordered_json::array();
    for (const auto& t : domain.types()) {
        ordered_json mu, loss;
        for (std::size_t c = 0; c < n; ++c) {
            mu[space.label(Config{c})] = t.mu[c];
            loss[space.label(Config{c})] = t.loss[c];
        }
        j["attacker_types"].push_back({{"id", t.id}, {"unknown", t.is_unknown}, {"mu", mu}, {"loss", loss}});
    }
    ordered_json sc;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < n; ++a)
            sc[space.label(Config{s})][space.label(Config{a})] = domain.switching_cost(Config{s}, Config{a});
    j["switching_cost"] = sc;
    j["M"] = domain.m();
    j["gamma"] = domain.gamma();
    j["alpha"] = domain.alpha();
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario JSON: ") + e.what());
    }
    Scenario scenario = with_context<ScenarioError>("scenario", [&] {
        Scenario sc;
        sc.horizon = j.at("T").get<int>();
        for (const auto& p : j.at("phases")) {
            ScenarioPhase phase;
            phase.start = p.at("start").get<int>();
            phase.end = p.at("end").get<int>();
            const auto mode = p.value("mode", std::string("static_dist"));
            if (mode == "static_dist") {
                phase.mode = PhaseMode::static_dist;
            } else if (mode == "most_adverse") {
                phase.mode = PhaseMode::most_adverse;
            } else {
                throw ScenarioError("unknown phase mode '" + mode + "'");
            }
            if (p.contains("dist")) phase.dist = p.at("dist").get<std::map<std::string, double>>();
            if (p.contains("per_state_dist"))
                phase.per_state_dist = p.at("per_state_dist").get<std::map<std::string, std::map<std::string, double>>>();
            sc.phases.push_back(std::move(phase));
        }
        return sc;
    });
    scenario.validate();
    return scenario;
}

std::string scenario_to_json(const Scenario& scenario) {
    ordered_json j;
    j["T"] = scenario.horizon;
    j["phases"] = ordered_json::array();
    for (const auto& p : scenario.phases) {
        ordered_json phase;
        phase["start"] = p.start;
        phase["end"] = p.end;
        phase["mode"] = p.mode == PhaseMode::static_dist ? "static_dist" : "most_adverse";
        phase["dist"] = p.dist;
        if (!p.per_state_dist.empty()) phase["per_state_dist"] = p.per_state_dist;
        j["phases"].push_back(std::move(phase));
    }
    return j.dump(2);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

double parse_number(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DomainError("CVSS CSV line " + std::to_string(line) + ": '" + s + "' is not a number");
    return v;
}

}  // namespace

std::vector<CvssRow> parse_cvss_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("CVSS CSV is empty");
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw DomainError("CVSS CSV is missing column '" + name + "'");
    };
    const std::size_t c_cfg = column("config_label"), c_type = column("attacker_type"), c_es = column("ES"),
                      c_is = column("IS");
    std::vector<CvssRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) throw DomainError("CVSS CSV line " + std::to_string(line_no) + ": wrong field count");
        rows.push_back({f[c_cfg], f[c_type], parse_number(f[c_es], line_no), parse_number(f[c_is], line_no)});
    }
    return rows;
}

std::map<std::pair<std::string, std::string>, CvssParams> aggregate_cvss(const std::vector<CvssRow>& rows) {
    std::map<std::pair<std::string, std::string>, std::pair<CvssParams, int>> acc;
    for (const auto& r : rows) {
        const auto p = cvss_to_params(r.exploitability, r.impact);
        auto& [sum, count] = acc[{r.config_label, r.attacker_type}];
        sum.mu += p.mu;
        sum.loss += p.loss;
        ++count;
    }
    std::map<std::pair<std::string, std::string>, CvssParams> out;
    for (const auto& [key, v] : acc) out[key] = {v.first.mu / v.second, v.first.loss / v.second};
    return out;
}

std::vector<AttackerTypeSpec> attacker_types_from_cvss(const ConfigSpace& space, const std::vector<CvssRow>& rows,
                                                       const std::string& unknown_id) {
    std::vector<std::string> ids;
    for (const auto& r : rows)
        if (std::find(ids.begin(), ids.end(), r.attacker_type) == ids.end()) ids.push_back(r.attacker_type);
    const auto params = aggregate_cvss(rows);
    std::vector<AttackerTypeSpec> types;
    for (const auto& id : ids) {
        AttackerTypeSpec t{id, id == unknown_id, std::vector<double>(space.size(), 0.0),
                           std::vector<double>(space.size(), 0.0)};
        for (const auto& [key, p] : params) {
            if (key.second != id) continue;
            const Config c = space.parse(key.first);
            t.mu[c.index] = p.mu;
            t.loss[c.index] = p.loss;
        }
        types.push_back(std::move(t));
    }
    return types;
}

}  // namespace mtd
