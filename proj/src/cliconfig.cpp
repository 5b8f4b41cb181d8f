#include "weakflux/cliconfig.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace weakflux {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;
    bool used = false;
};

using EntryMap = std::map<std::string, Entry>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

EntryMap tokenize(std::string_view text) {
    EntryMap entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        ++line_no;
        const std::size_t line_start = pos;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        std::string_view body = trim(line);
        if (body.empty()) continue;

        if (body.front() == '[') {
            if (body.back() != ']')
                throw ParseError("unterminated section header", line_no, 1);
            section = std::string(trim(body.substr(1, body.size() - 2)));
            if (section.empty()) throw ParseError("empty section name", line_no, 1);
            continue;
        }

        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key=value", line_no, 1);
        const std::string key = std::string(trim(body.substr(0, eq)));
        const std::string value = std::string(trim(body.substr(eq + 1)));
        if (key.empty()) throw ParseError("empty key", line_no, 1);
        if (value.empty()) throw ParseError("empty value for key '" + key + "'", line_no, 1);
        for (char ch : key) {
            if (!(std::islower(static_cast<unsigned char>(ch)) ||
                  std::isdigit(static_cast<unsigned char>(ch)) || ch == '_'))
                throw ParseError("keys are lowercase snake case; got '" + key + "'", line_no, 1);
        }
        const std::string full = section.empty() ? key : section + "." + key;
        const int column = static_cast<int>(line.find(key) - 0) + 1;
        (void)line_start;
        if (!entries.emplace(full, Entry{value, line_no, column, false}).second)
            throw ParseError("duplicate key '" + full + "'", line_no, column);
    }
    return entries;
}

class Reader {
public:
    explicit Reader(EntryMap entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string* raw(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second.value;
    }

    double number(const std::string& key, double fallback) {
        const std::string* v = raw(key);
        if (!v) return fallback;
        return parse_double(key, *v);
    }

    std::optional<double> number_opt(const std::string& key) {
        const std::string* v = raw(key);
        if (!v) return std::nullopt;
        return parse_double(key, *v);
    }

    long integer(const std::string& key, long fallback) {
        const std::string* v = raw(key);
        if (!v) return fallback;
        long out = 0;
        const auto* begin = v->data();
        const auto* end = v->data() + v->size();
        auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc() || ptr != end)
            throw ValidationError("key '" + key + "' expects an integer, got '" + *v + "'");
        return out;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        const std::string* v = raw(key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || ptr != v->data() + v->size())
            throw ValidationError("key '" + key + "' expects a nonnegative integer");
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : entries_) {
            if (!entry.used)
                throw ValidationError("unknown key '" + key + "' (line " +
                                      std::to_string(entry.line) + ")");
        }
    }

private:
    static double parse_double(const std::string& key, const std::string& v) {
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw ValidationError("key '" + key + "' expects a number, got '" + v + "'");
        return out;
    }

    EntryMap entries_;
};

std::optional<SpinorAmplitudes> read_spinor(Reader& r, const std::string& section) {
    const bool any = r.has(section + ".up_re") || r.has(section + ".up_im") ||
                     r.has(section + ".down_re") || r.has(section + ".down_im");
    if (!any) return std::nullopt;
    SpinorAmplitudes s;
    s.up = Complex(r.number(section + ".up_re", 0.0), r.number(section + ".up_im", 0.0));
    s.down = Complex(r.number(section + ".down_re", 0.0), r.number(section + ".down_im", 0.0));
    return s;
}

}  // namespace

const char* command_name(Command c) {
    switch (c) {
        case Command::SgDensity: return "sg-density";
        case Command::SgPt: return "sg-pt";
        case Command::SgPhaseGrid: return "sg-phase-grid";
        case Command::SgMax: return "sg-max";
        case Command::ScatterReport: return "scatter-report";
        case Command::TeReport: return "te-report";
        case Command::UncCheck: return "unc-check";
    }
    return "?";
}

Command command_from_name(std::string_view name) {
    for (Command c : {Command::SgDensity, Command::SgPt, Command::SgPhaseGrid, Command::SgMax,
                      Command::ScatterReport, Command::TeReport, Command::UncCheck}) {
        if (name == command_name(c)) return c;
    }
    throw ValidationError("unknown command '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text) {
    Reader r(tokenize(text));
    RunConfig cfg;

    const std::string* cmd = r.raw("command");
    if (!cmd) throw ValidationError("command is required");
    cfg.command = command_from_name(*cmd);

    if (const std::string* out = r.raw("out")) cfg.out = *out;
    cfg.seed = r.unsigned_integer("seed", 1);
    const long cases = r.integer("n", 200);
    if (cases < 0) throw ValidationError("n must be >= 0");
    cfg.cases = static_cast<int>(cases);
    const long threads = r.integer("threads", 0);
    if (threads < 0) throw ValidationError("threads must be >= 0");
    cfg.threads = static_cast<int>(threads);

    // Stern-Gerlach parameters; bare keys are accepted as [sg] shorthand.
    SGParams sg;
    auto sg_number = [&](const char* key, double fallback) {
        const std::string bare(key);
        const std::string nested = "sg." + bare;
        if (r.has(bare) && r.has(nested))
            throw ValidationError("key '" + bare + "' given both bare and in [sg]");
        return r.number(r.has(bare) ? bare : nested, fallback);
    };
    sg.alpha = sg_number("alpha", 0.5);
    sg.k_y = sg_number("k_y", 10.0);
    sg.y_s = sg_number("y_s", 10.0);
    sg.y_i = sg_number("y_i", -10.0);
    sg.chi_i = sg_number("chi_i", 0.0);
    sg.chi_f = sg_number("chi_f", 0.0);
    if (r.has("z0") || r.has("sg.z0")) sg.z0 = sg_number("z0", 0.0);
    if (!(sg.alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(sg.k_y > 0.0)) throw ValidationError("k_y must be positive");
    if (!(sg.y_s > 0.0)) throw ValidationError("y_s must be positive");
    sg.pre_spinor = read_spinor(r, "sg.pre_spinor");
    sg.post_spinor = read_spinor(r, "sg.post_spinor");
    cfg.sg = make_sg_config(sg, &cfg.warnings);

    // Scattering parameters.
    const double mass = r.number("scatter.mass", 1.0);
    const double hbar = r.number("scatter.hbar", 1.0);
    if (!(mass > 0.0)) throw ValidationError("mass must be positive");
    if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
    const double gamma = r.number("scatter.pre.gamma", 0.01);
    const double x_i = r.number("scatter.pre.center", -10.0);
    const double p_i = r.number("scatter.pre.momentum", 1.0);
    const double gamma_f = r.number("scatter.post.gamma", 10.0);
    const double x_f = r.number("scatter.post.center", 10.0);
    const double p_f = r.number("scatter.post.momentum", 0.0);
    if (!(gamma > 0.0) || !(gamma_f > 0.0))
        throw ValidationError("packet gamma must be positive");
    cfg.scatter = make_scatter_config(gamma, x_i, p_i, gamma_f, x_f, mass, hbar);
    cfg.scatter.post.momentum = p_f;
    if (const std::string* trans = r.raw("scatter.transmission")) {
        if (*trans == "free") {
            cfg.scatter.free_transmission = true;
        } else if (*trans == "eckart") {
            const double v0 = r.number("scatter.eckart_v0", 0.5);
            const double width = r.number("scatter.eckart_width", 1.0);
            cfg.scatter.transmission = eckart_transmission(v0, width, mass, hbar);
            cfg.scatter.free_transmission = false;
        } else {
            throw ValidationError("transmission must be 'free' or 'eckart'");
        }
    }
    for (const std::string& w : cfg.scatter.validate()) cfg.warnings.push_back(w);

    cfg.quad.rel_tol = r.number("quadrature.rel_tol", cfg.quad.rel_tol);
    cfg.quad.abs_tol = r.number("quadrature.abs_tol", cfg.quad.abs_tol);
    cfg.quad.truncation_ratio = r.number("quadrature.truncation_ratio", cfg.quad.truncation_ratio);
    cfg.quad.max_subdivisions =
        static_cast<int>(r.integer("quadrature.max_subdivisions", cfg.quad.max_subdivisions));
    cfg.quad.validate();

    cfg.grid.n_chi = static_cast<int>(r.integer("grid.n_chi", cfg.grid.n_chi));
    cfg.grid.n_t = static_cast<int>(r.integer("grid.n_t", cfg.grid.n_t));
    cfg.grid.t_min = r.number("grid.t_min", cfg.grid.t_min);
    cfg.grid.t_max = r.number("grid.t_max", cfg.grid.t_max);
    cfg.grid.n_z0 = static_cast<int>(r.integer("grid.n_z0", cfg.grid.n_z0));
    if (r.has("grid.z0_min") != r.has("grid.z0_max"))
        throw ValidationError("z0_min and z0_max must be given together");
    if (r.has("grid.z0_min")) {
        cfg.grid.z0_min = r.number("grid.z0_min", 0.0);
        cfg.grid.z0_max = r.number("grid.z0_max", 0.0);
        cfg.grid.z0_auto = false;
        if (!(cfg.grid.z0_max > cfg.grid.z0_min))
            throw ValidationError("z0_max must exceed z0_min");
    }
    if (cfg.grid.n_chi < 2 || cfg.grid.n_t < 2 || cfg.grid.n_z0 < 2)
        throw ValidationError("grid sizes must be at least 2");
    if (!(cfg.grid.t_min >= 0.0)) throw ValidationError("t_min must be nonnegative");
    if (cfg.grid.t_max >= 0.0 && !(cfg.grid.t_max > cfg.grid.t_min))
        throw ValidationError("t_max must exceed t_min");

    r.reject_unknown();
    return cfg;
}

}  // namespace weakflux
