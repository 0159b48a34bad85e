// config.cpp
#include "jcm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jcm {

namespace {

[[noreturn]] void fail(int lineno, const std::string& what) {
    throw std::runtime_error("config: line " + std::to_string(lineno) + ": " + what);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& text, int lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) fail(lineno, "trailing characters after number: '" + text + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(lineno, "not a number: '" + text + "'");
    } catch (const std::out_of_range&) {
        fail(lineno, "number out of range: '" + text + "'");
    }
}

TomlValue parse_scalar(const std::string& text, int lineno) {
    TomlValue v;
    if (text == "true" || text == "false") {
        v.type = TomlValue::Type::Bool;
        v.boolean = text == "true";
        return v;
    }
    if (!text.empty() && text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            fail(lineno, "unterminated string: " + text);
        const std::string inner = text.substr(1, text.size() - 2);
        if (inner.find('"') != std::string::npos)
            fail(lineno, "embedded quotes are not supported: " + text);
        v.type = TomlValue::Type::String;
        v.string = inner;
        return v;
    }
    v.type = TomlValue::Type::Number;
    v.number = parse_number(text, lineno);
    return v;
}

TomlValue parse_value(const std::string& text, int lineno) {
    if (text.empty()) fail(lineno, "missing value");
    if (text.front() != '[') return parse_scalar(text, lineno);

    if (text.back() != ']') fail(lineno, "unterminated array: " + text);
    TomlValue v;
    const std::string inner = trim(text.substr(1, text.size() - 2));
    if (inner.empty()) fail(lineno, "empty arrays are not supported");

    std::vector<std::string> items;
    std::string item;
    bool in_string = false;
    for (char c : inner) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            items.push_back(trim(item));
            item.clear();
        } else {
            item += c;
        }
    }
    items.push_back(trim(item));

    for (const std::string& it : items) {
        const TomlValue elem = parse_scalar(it, lineno);
        if (elem.type == TomlValue::Type::String) {
            v.strings.push_back(elem.string);
        } else if (elem.type == TomlValue::Type::Number) {
            v.numbers.push_back(elem.number);
        } else {
            fail(lineno, "arrays may contain only numbers or strings");
        }
    }
    if (!v.numbers.empty() && !v.strings.empty())
        fail(lineno, "arrays must be homogeneous: " + text);
    v.type = v.strings.empty() ? TomlValue::Type::NumberArray : TomlValue::Type::StringArray;
    return v;
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(lineno, "empty section name");
            table[section];  // a section may be empty
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(lineno, "empty key");
        if (section.empty()) fail(lineno, "key '" + key + "' outside any [section]");
        if (table[section].count(key)) fail(lineno, "duplicate key '" + key + "'");
        table[section][key] = parse_value(trim(line.substr(eq + 1)), lineno);
    }
    return table;
}

// --------------------------- spec mapping ------------------------------------

namespace {

const std::map<std::string, std::vector<std::string>>& allowed_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"model", {"g", "kappa", "gamma", "eta", "omega", "delta1_ratio"}},
        {"sweep",
         {"kind", "spin_dim", "delta_c_over_g", "delta2_ratio", "observables",
          "correlation_orders", "tau_grid"}},
        {"numerics",
         {"fock_cutoff", "escalated_cutoff", "workers", "steady_residual_tol", "abs_tol",
          "rel_tol"}},
    };
    return keys;
}

void check_known_keys(const TomlTable& table) {
    for (const auto& [section, entries] : table) {
        const auto it = allowed_keys().find(section);
        if (it == allowed_keys().end())
            throw std::runtime_error("config: unknown section [" + section + "]");
        for (const auto& [key, value] : entries) {
            const auto& allowed = it->second;
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw std::runtime_error("config: unknown key '" + key + "' in [" + section +
                                         "]");
        }
    }
}

const TomlValue* lookup(const TomlTable& table, const std::string& section,
                        const std::string& key) {
    const auto sit = table.find(section);
    if (sit == table.end()) return nullptr;
    const auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
}

double number_at(const TomlValue& v, const std::string& where) {
    if (v.type != TomlValue::Type::Number)
        throw std::runtime_error("config: " + where + " must be a number");
    return v.number;
}

int int_at(const TomlValue& v, const std::string& where) {
    const double d = number_at(v, where);
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-9 || std::abs(r) > 1e9)
        throw std::runtime_error("config: " + where + " must be an integer");
    return int(r);
}

void read_number(const TomlTable& t, const std::string& sec, const std::string& key,
                 double& into) {
    if (const TomlValue* v = lookup(t, sec, key)) into = number_at(*v, sec + "." + key);
}

void read_int(const TomlTable& t, const std::string& sec, const std::string& key, int& into) {
    if (const TomlValue* v = lookup(t, sec, key)) into = int_at(*v, sec + "." + key);
}

AxisSpec axis_at(const TomlValue& v, const std::string& where) {
    AxisSpec axis;
    if (v.type == TomlValue::Type::Number) {
        axis.from = axis.to = v.number;
        axis.points = 1;
        return axis;
    }
    if (v.type != TomlValue::Type::NumberArray || v.numbers.size() != 3)
        throw std::runtime_error("config: " + where +
                                 " must be a number or [from, to, points]");
    axis.from = v.numbers[0];
    axis.to = v.numbers[1];
    const double p = v.numbers[2];
    if (std::abs(p - std::round(p)) > 1e-9 || p < 1)
        throw std::runtime_error("config: " + where + ": points must be a positive integer");
    axis.points = int(std::round(p));
    return axis;
}

}  // namespace

SweepSpec parse_spec_toml(const std::string& text) {
    const TomlTable table = parse_toml(text);
    check_known_keys(table);

    SweepSpec spec;
    const TomlValue* g = lookup(table, "model", "g");
    if (!g) throw std::runtime_error("config: missing required key model.g");
    spec.model.g = number_at(*g, "model.g");
    read_number(table, "model", "kappa", spec.model.kappa);
    read_number(table, "model", "gamma", spec.model.gamma);
    read_number(table, "model", "eta", spec.model.eta);
    read_number(table, "model", "omega", spec.model.omega);
    read_number(table, "model", "delta1_ratio", spec.model.delta1_ratio);
    spec.model.delta_c = spec.model.g;  // placeholder; sweeps set it per point

    if (const TomlValue* v = lookup(table, "sweep", "kind")) {
        if (v->type != TomlValue::Type::String)
            throw std::runtime_error("config: sweep.kind must be a string");
        spec.kind = sweep_kind_from_name(v->string);
    }
    read_int(table, "sweep", "spin_dim", spec.spin_dim);
    if (const TomlValue* v = lookup(table, "sweep", "delta_c_over_g"))
        spec.delta_c_over_g = axis_at(*v, "sweep.delta_c_over_g");
    if (const TomlValue* v = lookup(table, "sweep", "delta2_ratio"))
        spec.delta2_ratio = axis_at(*v, "sweep.delta2_ratio");
    if (const TomlValue* v = lookup(table, "sweep", "observables")) {
        if (v->type != TomlValue::Type::StringArray)
            throw std::runtime_error("config: sweep.observables must be a string array");
        for (const std::string& name : v->strings)
            spec.observables.push_back(observable_from_name(name));
    }
    if (const TomlValue* v = lookup(table, "sweep", "correlation_orders")) {
        if (v->type != TomlValue::Type::NumberArray)
            throw std::runtime_error("config: sweep.correlation_orders must be a number array");
        for (double d : v->numbers) {
            TomlValue elem;
            elem.number = d;
            spec.correlation_orders.push_back(int_at(elem, "sweep.correlation_orders"));
        }
    }
    if (const TomlValue* v = lookup(table, "sweep", "tau_grid")) {
        if (v->type != TomlValue::Type::NumberArray)
            throw std::runtime_error("config: sweep.tau_grid must be a number array");
        spec.tau_grid = v->numbers;
    }

    read_int(table, "numerics", "fock_cutoff", spec.numerics.fock_cutoff);
    read_int(table, "numerics", "escalated_cutoff", spec.numerics.escalated_cutoff);
    read_int(table, "numerics", "workers", spec.numerics.workers);
    read_number(table, "numerics", "steady_residual_tol", spec.numerics.steady_residual_tol);
    read_number(table, "numerics", "abs_tol", spec.numerics.abs_tol);
    read_number(table, "numerics", "rel_tol", spec.numerics.rel_tol);

    spec.validate();
    return spec;
}

SweepSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_toml(buf.str());
}

// --------------------------- serialization -----------------------------------

namespace {

std::string axis_toml(const AxisSpec& axis) {
    if (axis.points == 1) return format_number(axis.from);
    return "[" + format_number(axis.from) + ", " + format_number(axis.to) + ", " +
           std::to_string(axis.points) + "]";
}

}  // namespace

std::string spec_to_toml(const SweepSpec& spec) {
    std::ostringstream os;
    os << "# spin-1 Jaynes-Cummings sweep configuration\n";
    os << "# all rates are in units of kappa; the reference cavity linewidth is\n";
    os << "# kappa = 2*pi*160 kHz, so tau = 1 in the delay traces is ~1 microsecond\n";
    os << '\n';
    os << "[model]\n";
    os << "g = " << format_number(spec.model.g) << '\n';
    os << "kappa = " << format_number(spec.model.kappa) << '\n';
    os << "gamma = " << format_number(spec.model.gamma) << '\n';
    os << "eta = " << format_number(spec.model.eta) << '\n';
    os << "omega = " << format_number(spec.model.omega) << '\n';
    os << "delta1_ratio = " << format_number(spec.model.delta1_ratio) << '\n';
    os << '\n';
    os << "[sweep]\n";
    os << "kind = \"" << sweep_kind_name(spec.kind) << "\"\n";
    os << "spin_dim = " << spec.spin_dim << '\n';
    os << "delta_c_over_g = " << axis_toml(spec.delta_c_over_g) << '\n';
    os << "delta2_ratio = " << axis_toml(spec.delta2_ratio) << '\n';
    os << "observables = [";
    for (std::size_t i = 0; i < spec.observables.size(); ++i)
        os << (i ? ", " : "") << '"' << observable_name(spec.observables[i]) << '"';
    os << "]\n";
    if (!spec.correlation_orders.empty()) {
        os << "correlation_orders = [";
        for (std::size_t i = 0; i < spec.correlation_orders.size(); ++i)
            os << (i ? ", " : "") << spec.correlation_orders[i];
        os << "]\n";
    }
    if (!spec.tau_grid.empty()) {
        os << "tau_grid = [";
        for (std::size_t i = 0; i < spec.tau_grid.size(); ++i)
            os << (i ? ", " : "") << format_number(spec.tau_grid[i]);
        os << "]\n";
    }
    os << '\n';
    os << "[numerics]\n";
    os << "fock_cutoff = " << spec.numerics.fock_cutoff << '\n';
    os << "escalated_cutoff = " << spec.numerics.escalated_cutoff << '\n';
    os << "workers = " << spec.numerics.workers << '\n';
    os << "steady_residual_tol = " << format_number(spec.numerics.steady_residual_tol) << '\n';
    os << "abs_tol = " << format_number(spec.numerics.abs_tol) << '\n';
    os << "rel_tol = " << format_number(spec.numerics.rel_tol) << '\n';
    return os.str();
}

}  // namespace jcm
