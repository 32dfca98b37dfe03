#include "qprop/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "qprop/errors.hpp"

namespace qprop {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class ConfigReader {
public:
    ConfigReader(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_);
        if (!in) throw IoError("cannot open config file '" + path_ + "'");
        std::string line;
        std::string section = "";
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    fail(lineno, "malformed section header '" + line + "'");
                section = trim(line.substr(1, line.size() - 2));
                sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                fail(lineno, "expected 'key = value', got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            sections_[section][key] = Entry{value, lineno, false};
        }
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(path_ + ":" + std::to_string(line) + ": " + msg);
    }

    bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

    const Entry* find(const std::string& section, const std::string& key) {
        auto sit = sections_.find(section);
        if (sit == sections_.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        kit->second.used = true;
        return &kit->second;
    }

    std::optional<std::string> get_string(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        return e->value;
    }

    std::optional<double> get_double(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        double v = 0.0;
        const char* first = e->value.data();
        const char* last = first + e->value.size();
        auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last)
            fail(e->line, section + "." + key + ": expected a number, got '" + e->value + "'");
        return v;
    }

    std::optional<int> get_int(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        int v = 0;
        const char* first = e->value.data();
        const char* last = first + e->value.size();
        auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last)
            fail(e->line, section + "." + key + ": expected an integer, got '" + e->value + "'");
        return v;
    }

    std::optional<expr::Expr> get_expr(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        try {
            return expr::parse_expression(e->value);
        } catch (const ParseError& pe) {
            fail(e->line, section + "." + key + ": " + pe.what());
        }
    }

    void check_all_used() const {
        for (const auto& [sname, section] : sections_)
            for (const auto& [key, entry] : section)
                if (!entry.used)
                    fail(entry.line, "unknown key '" + key + "' in section [" + sname + "]");
    }

    const Section* section(const std::string& name) const {
        auto it = sections_.find(name);
        return it == sections_.end() ? nullptr : &it->second;
    }

    void mark_section_used(const std::string& name) {
        auto it = sections_.find(name);
        if (it == sections_.end()) return;
        for (auto& [key, entry] : it->second) entry.used = true;
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::map<std::string, Section> sections_;
};

FamilyTag parse_family(ConfigReader& reader, const Entry& entry) {
    const std::string& v = entry.value;
    if (v == "free") return FamilyTag::Free;
    if (v == "harmonic") return FamilyTag::Harmonic;
    if (v == "driven-harmonic") return FamilyTag::DrivenHarmonic;
    if (v == "paul-trap") return FamilyTag::PaulTrap;
    if (v == "custom") return FamilyTag::Custom;
    reader.fail(entry.line, "unknown potential family '" + v +
                                "' (free, harmonic, driven-harmonic, paul-trap, custom)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

RunConfig load_config(const std::string& path) {
    ConfigReader reader(path);
    RunConfig cfg;
    cfg.source_path = path;

    // [system]
    if (auto v = reader.get_double("system", "m")) cfg.mass = *v;
    if (auto v = reader.get_double("system", "hbar")) cfg.hbar = *v;
    if (auto v = reader.get_double("system", "omega")) cfg.omega = *v;
    if (!(cfg.mass > 0.0)) throw ConfigError(path + ": system.m must be positive");
    if (!(cfg.hbar > 0.0)) throw ConfigError(path + ": system.hbar must be positive");
    if (cfg.omega && !(*cfg.omega > 0.0))
        throw ConfigError(path + ": system.omega must be positive");

    // [parameters] -- free-form bindings for expressions.
    if (const Section* params = reader.section("parameters")) {
        for (const auto& [key, entry] : *params) {
            double v = 0.0;
            const char* first = entry.value.data();
            const char* last = first + entry.value.size();
            auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last)
                reader.fail(entry.line, "parameters." + key + ": expected a number, got '" +
                                            entry.value + "'");
            cfg.family.params[key] = v;
        }
        reader.mark_section_used("parameters");
    }

    // [potential]
    const Entry* fam_entry = reader.find("potential", "family");
    if (!fam_entry) throw ConfigError(path + ": missing required key potential.family");
    cfg.family.tag = parse_family(reader, *fam_entry);
    cfg.family.mass = cfg.mass;
    cfg.family.hbar = cfg.hbar;
    cfg.family.omega = cfg.omega.value_or(1.0);
    if (auto v = reader.get_double("potential", "a")) cfg.family.a = *v;
    if (auto v = reader.get_double("potential", "q")) cfg.family.q = *v;
    if (auto v = reader.get_double("potential", "r")) cfg.family.r = *v;
    if (auto e = reader.get_expr("potential", "drive")) cfg.family.drive = *e;
    if (auto e = reader.get_expr("potential", "c_expr")) cfg.family.c_custom = *e;
    if (auto e = reader.get_expr("potential", "e_expr")) cfg.family.e_custom = *e;

    switch (cfg.family.tag) {
        case FamilyTag::DrivenHarmonic:
            if (!cfg.family.drive.valid())
                throw ConfigError(path + ": driven-harmonic family needs potential.drive");
            break;
        case FamilyTag::PaulTrap:
            if (!(cfg.family.r > 0.0))
                throw ConfigError(path + ": paul-trap family needs potential.r > 0");
            break;
        case FamilyTag::Custom:
            if (!cfg.family.c_custom.valid() || !cfg.family.e_custom.valid())
                throw ConfigError(path +
                                  ": custom family needs potential.c_expr and potential.e_expr");
            break;
        default:
            break;
    }

    // [initial_state]
    if (auto v = reader.get_string("initial_state", "lambda0")) {
        if (*v == "matched") {
            cfg.matched_width = true;
        } else {
            cfg.matched_width = false;
            double lv = 0.0;
            const char* first = v->data();
            const char* last = first + v->size();
            auto res = std::from_chars(first, last, lv);
            if (res.ec != std::errc() || res.ptr != last)
                throw ConfigError(path + ": initial_state.lambda0 must be 'matched' or a number");
            if (!(lv > 0.0))
                throw ConfigError(path + ": initial_state.lambda0 must be positive");
            cfg.lambda0 = lv;
        }
    }

    // [integration]
    cfg.t_max = reader.get_double("integration", "t_max");
    cfg.u_max = reader.get_double("integration", "u_max");
    if (auto v = reader.get_double("integration", "output_step")) cfg.output_step = *v;
    if (auto v = reader.get_double("integration", "rtol")) cfg.rtol = *v;
    if (auto v = reader.get_double("integration", "atol")) cfg.atol = *v;
    if (cfg.t_max && cfg.u_max)
        throw ConfigError(path + ": give integration.t_max or integration.u_max, not both");
    if (cfg.u_max && !cfg.omega)
        throw ConfigError(path + ": integration.u_max needs system.omega");
    if ((cfg.t_max && !(*cfg.t_max > 0.0)) || (cfg.u_max && !(*cfg.u_max > 0.0)))
        throw ConfigError(path + ": integration span must be positive");
    if (!(cfg.output_step > 0.0))
        throw ConfigError(path + ": integration.output_step must be positive");
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
        throw ConfigError(path + ": tolerances must be positive");

    // [outputs]
    if (auto v = reader.get_string("outputs", "columns")) cfg.columns = split_list(*v);
    if (auto v = reader.get_int("outputs", "n_max")) {
        if (*v < 0) throw ConfigError(path + ": outputs.n_max must be non-negative");
        cfg.n_max = *v;
    }
    if (auto v = reader.get_string("outputs", "path")) cfg.path = *v;
    if (auto v = reader.get_string("outputs", "format")) {
        if (*v == "csv") cfg.format = OutputFormat::Csv;
        else if (*v == "json") cfg.format = OutputFormat::Json;
        else throw ConfigError(path + ": outputs.format must be csv or json");
    }

    // [kernel]
    cfg.kernel_t = reader.get_double("kernel", "t");
    if (auto v = reader.get_double("kernel", "x_min")) cfg.kernel_x.lo = *v;
    if (auto v = reader.get_double("kernel", "x_max")) cfg.kernel_x.hi = *v;
    if (auto v = reader.get_int("kernel", "x_points")) cfg.kernel_x.points = *v;
    if (auto v = reader.get_double("kernel", "xp_min")) cfg.kernel_xp.lo = *v;
    if (auto v = reader.get_double("kernel", "xp_max")) cfg.kernel_xp.hi = *v;
    if (auto v = reader.get_int("kernel", "xp_points")) cfg.kernel_xp.points = *v;
    if (cfg.kernel_x.points < 1 || cfg.kernel_xp.points < 1)
        throw ConfigError(path + ": kernel grid needs at least one point per axis");

    // [scan]
    if (reader.has_section("scan")) {
        ScanRange ar, qr;
        bool have_a = false, have_q = false;
        if (auto v = reader.get_double("scan", "a_min")) { ar.lo = *v; have_a = true; }
        if (auto v = reader.get_double("scan", "a_max")) { ar.hi = *v; have_a = true; }
        if (auto v = reader.get_int("scan", "a_points")) { ar.n = *v; have_a = true; }
        if (auto v = reader.get_double("scan", "q_min")) { qr.lo = *v; have_q = true; }
        if (auto v = reader.get_double("scan", "q_max")) { qr.hi = *v; have_q = true; }
        if (auto v = reader.get_int("scan", "q_points")) { qr.n = *v; have_q = true; }
        if (auto v = reader.get_double("scan", "r")) cfg.scan_r = *v;
        if (!have_a || !have_q)
            throw ConfigError(path + ": scan section needs both a and q ranges");
        if (ar.n < 1 || qr.n < 1)
            throw ConfigError(path + ": scan ranges must contain at least one point");
        if (!(cfg.scan_r > 0.0)) throw ConfigError(path + ": scan.r must be positive");
        cfg.scan_a = ar;
        cfg.scan_q = qr;
    }

    reader.check_all_used();
    return cfg;
}

} // namespace qprop
