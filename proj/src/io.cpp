#include "fsw/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fsw/errors.hpp"

namespace fsw {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

void check_keys(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!n.IsMap()) throw ParseError(where + ": expected a mapping", line_of(n));
    for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError("unknown key '" + (where.empty() ? key : where + "." + key) + "'", line_of(kv.first));
    }
}

std::string join(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

template <class T>
void get(const YAML::Node& n, const char* key, const std::string& where, T& out) {
    const YAML::Node v = n[key];
    if (!v) return;
    try {
        out = v.as<T>();
    } catch (const YAML::Exception&) {
        throw ParseError(join(where, key) + ": value of the wrong type", line_of(v));
    }
}

SurfaceMode parse_mode(const YAML::Node& n, const std::string& where) {
    SurfaceMode m;
    get(n, "m1", where, m.m1);
    get(n, "m2", where, m.m2);
    get(n, "amplitude", where, m.amplitude);
    get(n, "kind", where, m.kind);
    return m;
}

void emit_mode(YAML::Emitter& e, const SurfaceMode& m) {
    e << YAML::Key << "m1" << YAML::Value << m.m1 << YAML::Key << "m2" << YAML::Value << m.m2 << YAML::Key
      << "amplitude" << YAML::Value << m.amplitude << YAML::Key << "kind" << YAML::Value << m.kind;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError(field, what);
}

double mode_value(const SurfaceMode& m, const Grid& g, double x1, double x2) {
    const double ph = 2.0 * M_PI * (m.m1 * x1 / g.l1() + m.m2 * x2 / g.l2());
    return m.amplitude * (m.kind == "sin" ? std::sin(ph) : std::cos(ph));
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw IoError("cannot open " + path + ": " + std::strerror(errno));
    return f;
}

const char* kDiagHeader = "t,E,D,F2N,Kcal,mass,balance_residual";

void write_row(std::FILE* f, const EnergyReport& r) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.E, r.D, r.F2N, r.Kcal, r.mass,
                 r.balance_residual);
}

void write_doubles(std::ofstream& os, const double* v, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v), std::streamsize(n * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto b = std::bit_cast<std::uint64_t>(v[i]);
            b = __builtin_bswap64(b);
            os.write(reinterpret_cast<const char*>(&b), sizeof b);
        }
    }
}

void read_doubles(std::ifstream& is, double* v, std::size_t n) {
    is.read(reinterpret_cast<char*>(v), std::streamsize(n * sizeof(double)));
    if constexpr (std::endian::native != std::endian::little) {
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(v[i])));
    }
}

std::map<std::string, std::string> read_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("missing snapshot metadata " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("malformed metadata line: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

double meta_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("snapshot metadata lacks '" + key + "'");
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end) throw FormatError("bad value for '" + key + "': " + it->second);
    return v;
}

int meta_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    const double v = meta_double(kv, key);
    if (v != std::floor(v)) throw FormatError("'" + key + "' must be an integer");
    return int(v);
}

std::size_t data_rows(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        ++rows;
    }
    return rows;
}

std::string quoted(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("''") : std::string(1, c);
    return out + "'";
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1);
    }
    SimConfig c;
    if (root.IsNull()) return c;
    check_keys(root, "", {"grid", "physics", "scheme", "diagnostics", "io", "initial", "experiments"});
    if (const YAML::Node n = root["grid"]) {
        check_keys(n, "grid", {"n1", "n2", "nz", "l1", "l2", "b"});
        get(n, "n1", "grid", c.grid.n1);
        get(n, "n2", "grid", c.grid.n2);
        get(n, "nz", "grid", c.grid.nz);
        get(n, "l1", "grid", c.grid.l1);
        get(n, "l2", "grid", c.grid.l2);
        get(n, "b", "grid", c.grid.b);
    }
    if (const YAML::Node n = root["physics"]) {
        check_keys(n, "physics", {"sigma", "kappa"});
        get(n, "sigma", "physics", c.sigma);
        get(n, "kappa", "physics", c.kappa);
    }
    if (const YAML::Node n = root["scheme"]) {
        check_keys(n, "scheme", {"dt", "end_time", "mode", "compensator_tau", "linear"});
        get(n, "dt", "scheme", c.dt);
        get(n, "end_time", "scheme", c.end_time);
        get(n, "compensator_tau", "scheme", c.compensator_tau);
        get(n, "linear", "scheme", c.linear);
        std::string mode = c.mode == StepMode::Coupled ? "coupled" : "split";
        get(n, "mode", "scheme", mode);
        if (mode == "split") c.mode = StepMode::Split;
        else if (mode == "coupled") c.mode = StepMode::Coupled;
        else throw ValidationError("scheme.mode", "expected split or coupled, got '" + mode + "'");
    }
    if (const YAML::Node n = root["diagnostics"]) {
        check_keys(n, "diagnostics", {"n", "jmax", "stride", "s_F"});
        get(n, "n", "diagnostics", c.diagnostics.n);
        get(n, "jmax", "diagnostics", c.diagnostics.jmax);
        get(n, "stride", "diagnostics", c.diagnostics.stride);
        get(n, "s_F", "diagnostics", c.diagnostics.s_F);
    }
    if (const YAML::Node n = root["io"]) {
        check_keys(n, "io", {"output", "snapshot_stride"});
        get(n, "output", "io", c.io.output);
        get(n, "snapshot_stride", "io", c.io.snapshot_stride);
    }
    if (const YAML::Node n = root["initial"]) {
        check_keys(n, "initial", {"eta", "u", "file"});
        get(n, "file", "initial", c.initial.file);
        if (const YAML::Node e = n["eta"]) {
            if (!e.IsSequence()) throw ParseError("initial.eta: expected a list", line_of(e));
            for (const auto& m : e) {
                check_keys(m, "initial.eta[]", {"m1", "m2", "amplitude", "kind"});
                c.initial.eta.push_back(parse_mode(m, "initial.eta[]"));
            }
        }
        if (const YAML::Node u = n["u"]) {
            if (!u.IsSequence()) throw ParseError("initial.u: expected a list", line_of(u));
            for (const auto& m : u) {
                check_keys(m, "initial.u[]", {"component", "m1", "m2", "amplitude", "kind"});
                VelocityMode v;
                get(m, "component", "initial.u[]", v.component);
                v.mode = parse_mode(m, "initial.u[]");
                c.initial.u.push_back(v);
            }
        }
    }
    if (const YAML::Node n = root["experiments"]) {
        check_keys(n, "experiments", {"sigmas", "kappas", "decay_t0", "decay_t1", "compare_stride", "threads"});
        get(n, "sigmas", "experiments", c.experiments.sigmas);
        get(n, "kappas", "experiments", c.experiments.kappas);
        get(n, "decay_t0", "experiments", c.experiments.decay_t0);
        get(n, "decay_t1", "experiments", c.experiments.decay_t1);
        get(n, "compare_stride", "experiments", c.experiments.compare_stride);
        get(n, "threads", "experiments", c.experiments.threads);
    }
    validate(c);
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const SimConfig& c) {
    require(c.grid.n1 >= 4 && c.grid.n1 % 2 == 0, "grid.n1", "must be an even number >= 4");
    require(c.grid.n2 >= 4 && c.grid.n2 % 2 == 0, "grid.n2", "must be an even number >= 4");
    require(c.grid.nz >= 5, "grid.nz", "must be at least 5");
    require(c.grid.l1 > 0.0, "grid.l1", "must be positive");
    require(c.grid.l2 > 0.0, "grid.l2", "must be positive");
    require(c.grid.b > 0.0, "grid.b", "must be positive");
    require(c.sigma >= 0.0, "physics.sigma", "must be nonnegative");
    require(c.kappa >= 0.0, "physics.kappa", "must be nonnegative");
    require(c.dt > 0.0 && std::isfinite(c.dt), "scheme.dt", "must be positive");
    require(c.end_time >= 0.0, "scheme.end_time", "must be nonnegative");
    require(c.compensator_tau > 0.0, "scheme.compensator_tau", "must be positive");
    require(c.diagnostics.n >= 1, "diagnostics.n", "must be at least 1");
    require(c.diagnostics.jmax == 0 || c.diagnostics.jmax == 1, "diagnostics.jmax", "must be 0 or 1");
    require(c.diagnostics.stride >= 1, "diagnostics.stride", "must be at least 1");
    require(c.diagnostics.s_F >= 0.0, "diagnostics.s_F", "must be nonnegative");
    require(!c.io.output.empty(), "io.output", "must not be empty");
    require(c.io.snapshot_stride >= 0, "io.snapshot_stride", "must be nonnegative");
    for (const auto& m : c.initial.eta) require(m.kind == "cos" || m.kind == "sin", "initial.eta.kind", "cos or sin");
    for (const auto& v : c.initial.u) {
        require(v.mode.kind == "cos" || v.mode.kind == "sin", "initial.u.kind", "cos or sin");
        require(v.component >= 0 && v.component <= 2, "initial.u.component", "must be 0, 1 or 2");
    }
    for (double s : c.experiments.sigmas) require(s >= 0.0, "experiments.sigmas", "must be nonnegative");
    for (double k : c.experiments.kappas) require(k >= 0.0, "experiments.kappas", "must be nonnegative");
    require(c.experiments.decay_t1 > c.experiments.decay_t0, "experiments.decay_t1", "must exceed decay_t0");
    require(c.experiments.compare_stride >= 1, "experiments.compare_stride", "must be at least 1");
    require(c.experiments.threads >= 0, "experiments.threads", "must be nonnegative");
}

std::string dump_config(const SimConfig& c) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n1" << YAML::Value << c.grid.n1 << YAML::Key << "n2" << YAML::Value << c.grid.n2;
    e << YAML::Key << "nz" << YAML::Value << c.grid.nz << YAML::Key << "l1" << YAML::Value << c.grid.l1;
    e << YAML::Key << "l2" << YAML::Value << c.grid.l2 << YAML::Key << "b" << YAML::Value << c.grid.b;
    e << YAML::EndMap;
    e << YAML::Key << "physics" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "sigma" << YAML::Value << c.sigma << YAML::Key << "kappa" << YAML::Value << c.kappa;
    e << YAML::EndMap;
    e << YAML::Key << "scheme" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dt" << YAML::Value << c.dt << YAML::Key << "end_time" << YAML::Value << c.end_time;
    e << YAML::Key << "mode" << YAML::Value << (c.mode == StepMode::Coupled ? "coupled" : "split");
    e << YAML::Key << "compensator_tau" << YAML::Value << c.compensator_tau;
    e << YAML::Key << "linear" << YAML::Value << c.linear;
    e << YAML::EndMap;
    e << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n" << YAML::Value << c.diagnostics.n << YAML::Key << "jmax" << YAML::Value
      << c.diagnostics.jmax;
    e << YAML::Key << "stride" << YAML::Value << c.diagnostics.stride << YAML::Key << "s_F" << YAML::Value
      << c.diagnostics.s_F;
    e << YAML::EndMap;
    e << YAML::Key << "io" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "output" << YAML::Value << c.io.output << YAML::Key << "snapshot_stride" << YAML::Value
      << c.io.snapshot_stride;
    e << YAML::EndMap;
    e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "eta" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : c.initial.eta) {
        e << YAML::Flow << YAML::BeginMap;
        emit_mode(e, m);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::Key << "u" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : c.initial.u) {
        e << YAML::Flow << YAML::BeginMap << YAML::Key << "component" << YAML::Value << v.component;
        emit_mode(e, v.mode);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    if (!c.initial.file.empty()) e << YAML::Key << "file" << YAML::Value << c.initial.file;
    e << YAML::EndMap;
    e << YAML::Key << "experiments" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "sigmas" << YAML::Value << YAML::Flow << c.experiments.sigmas;
    e << YAML::Key << "kappas" << YAML::Value << YAML::Flow << c.experiments.kappas;
    e << YAML::Key << "decay_t0" << YAML::Value << c.experiments.decay_t0;
    e << YAML::Key << "decay_t1" << YAML::Value << c.experiments.decay_t1;
    e << YAML::Key << "compare_stride" << YAML::Value << c.experiments.compare_stride;
    e << YAML::Key << "threads" << YAML::Value << c.experiments.threads;
    e << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

void save_config(const SimConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << dump_config(c);
    if (!out) throw IoError("write failed for " + path);
}

SchemeConfig scheme_of(const SimConfig& c) {
    SchemeConfig s;
    s.dt = c.dt;
    s.sigma = c.sigma;
    s.kappa = c.kappa;
    s.mode = c.mode;
    s.compensator_tau = c.compensator_tau;
    s.end_time = c.end_time;
    s.linear = c.linear;
    return s;
}

Truncation truncation_of(const SimConfig& c) {
    Truncation t;
    t.n = c.diagnostics.n;
    t.jmax = c.diagnostics.jmax;
    t.s_F = c.diagnostics.s_F;
    return t;
}

ExperimentConfig experiment_of(const SimConfig& c) {
    ExperimentConfig e;
    e.grid = c.grid;
    e.scheme = scheme_of(c);
    e.truncation = truncation_of(c);
    e.diag_stride = c.diagnostics.stride;
    e.compare_stride = c.experiments.compare_stride;
    e.threads = c.experiments.threads;
    return e;
}

InitialData initial_data_of(const SimConfig& c, const GridPtr& g) {
    if (!c.initial.file.empty()) {
        Snapshot s = read_snapshot(c.initial.file, &c.grid);
        return {s.state.u, s.state.eta};
    }
    const Grid& gr = *g;
    InitialData d;
    d.eta0 = SurfaceField::from_function(g, [&](double x1, double x2) {
        double v = 0.0;
        for (const auto& m : c.initial.eta) v += mode_value(m, gr, x1, x2);
        return v;
    });
    d.u0 = VolumeField::from_function3(g, [&](double x1, double x2, double x3) {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        for (const auto& m : c.initial.u) v[m.component] += mode_value(m.mode, gr, x1, x2) * (1.0 + x3 / gr.b());
        return v;
    });
    return d;
}

DiagnosticsWriter::DiagnosticsWriter(const std::string& path) : path_(path), f_(open_or_throw(path, "w")) {
    std::fprintf(f_, "%s\n", kDiagHeader);
    flush();
}

DiagnosticsWriter::~DiagnosticsWriter() {
    if (f_) std::fclose(f_);
}

void DiagnosticsWriter::append(const EnergyReport& r) {
    write_row(f_, r);
    flush();
}

void DiagnosticsWriter::flush() {
    if (std::fflush(f_) != 0 || std::ferror(f_)) throw IoError("write failed for " + path_);
}

void write_diagnostics(const std::vector<EnergyReport>& reports, const std::string& path) {
    DiagnosticsWriter w(path);
    for (const auto& r : reports) write_row(w.file(), r);
    w.flush();
}

std::vector<EnergyReport> read_diagnostics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != kDiagHeader) throw FormatError(path + ": unexpected header");
    std::vector<EnergyReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EnergyReport r;
        double* fields[] = {&r.t, &r.E, &r.D, &r.F2N, &r.Kcal, &r.mass, &r.balance_residual};
        const char* p = line.c_str();
        for (int i = 0; i < 7; ++i) {
            char* end = nullptr;
            *fields[i] = std::strtod(p, &end);
            if (end == p) throw FormatError(path + ": malformed row '" + line + "'");
            p = end;
            if (i < 6) {
                if (*p != ',') throw FormatError(path + ": malformed row '" + line + "'");
                ++p;
            }
        }
        if (*p) throw FormatError(path + ": trailing data in row '" + line + "'");
        out.push_back(r);
    }
    return out;
}

void write_snapshot(const FluidState& s, const std::string& path, double sigma, double kappa) {
    const Grid& g = *s.u.grid();
    const std::size_t n = s.u.size() + s.p.size() + s.eta.size();
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot write " + path);
        write_doubles(os, s.u.data(), s.u.size());
        write_doubles(os, s.p.data(), s.p.size());
        write_doubles(os, s.eta.data(), s.eta.size());
        if (!os) throw IoError("write failed for " + path);
    }
    std::ofstream meta(path + ".meta", std::ios::trunc);
    if (!meta) throw IoError("cannot write " + path + ".meta");
    meta << "# raw little-endian float64: u[x1,x2,x3,component], p[x1,x2,x3], eta[x1,x2]\n";
    meta << "format = fsw-snapshot\n";
    meta << "version = " << kSnapshotVersion << "\n";
    meta << "n1 = " << g.n1() << "\nn2 = " << g.n2() << "\nnz = " << g.nz() << "\n";
    meta << "l1 = " << fmt17(g.l1()) << "\nl2 = " << fmt17(g.l2()) << "\nb = " << fmt17(g.b()) << "\n";
    meta << "t = " << fmt17(s.t) << "\nsigma = " << fmt17(sigma) << "\nkappa = " << fmt17(kappa) << "\n";
    meta << "doubles = " << n << "\n";
    if (!meta) throw IoError("write failed for " + path + ".meta");
}

Snapshot read_snapshot(const std::string& path, const GridSpec* expected) {
    const auto kv = read_meta(path + ".meta");
    auto fmt = kv.find("format");
    if (fmt == kv.end() || fmt->second != "fsw-snapshot") throw FormatError(path + ".meta: not a snapshot");
    const int version = meta_int(kv, "version");
    if (version != kSnapshotVersion)
        throw VersionError(path + ": snapshot version " + std::to_string(version) + ", expected " +
                           std::to_string(kSnapshotVersion));
    GridSpec spec;
    spec.n1 = meta_int(kv, "n1");
    spec.n2 = meta_int(kv, "n2");
    spec.nz = meta_int(kv, "nz");
    spec.l1 = meta_double(kv, "l1");
    spec.l2 = meta_double(kv, "l2");
    spec.b = meta_double(kv, "b");
    if (spec.n1 < 2 || spec.n2 < 2 || spec.nz < 3) throw FormatError(path + ": invalid grid shape");
    if (expected && !(*expected == spec)) throw FormatError(path + ": snapshot grid does not match the requested grid");
    const std::size_t plane = std::size_t(spec.n1) * spec.n2;
    const std::size_t vol = plane * spec.nz;
    const std::size_t n = 4 * vol + plane;
    if (std::size_t(meta_int(kv, "doubles")) != n) throw FormatError(path + ": value count disagrees with the grid");
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    if (ec) throw FormatError("missing snapshot data " + path);
    if (bytes != n * sizeof(double))
        throw FormatError(path + ": expected " + std::to_string(n * sizeof(double)) + " bytes, found " +
                          std::to_string(bytes));
    GridPtr g = Grid::create(spec);
    VolumeField u(g, 3), p(g);
    SurfaceField eta(g);
    std::ifstream is(path, std::ios::binary);
    read_doubles(is, u.data(), u.size());
    read_doubles(is, p.data(), p.size());
    read_doubles(is, eta.data(), eta.size());
    if (!is) throw FormatError(path + ": short read");
    Snapshot s;
    s.sigma = meta_double(kv, "sigma");
    s.kappa = meta_double(kv, "kappa");
    s.state = make_state(std::move(u), std::move(p), std::move(eta), meta_double(kv, "t"));
    return s;
}

void write_sweep(const SweepResult& r, const std::string& path) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "value,metric,steps,aborted\n");
    for (const auto& run : r.runs)
        std::fprintf(f, "%.17g,%.17g,%ld,%d\n", run.value, run.metric, run.summary.steps, int(run.summary.aborted));
    const bool bad = std::ferror(f);
    if (std::fclose(f) != 0 || bad) throw IoError("write failed for " + path);
}

void write_decay_fit(const DecayReport& r, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << "degenerate = " << r.degenerate << "\n";
    os << "rate = " << fmt17(r.rate) << "\nr2_exponential = " << fmt17(r.r2_exp) << "\n";
    if (r.has_algebraic) os << "exponent = " << fmt17(r.exponent) << "\nr2_algebraic = " << fmt17(r.r2_alg) << "\n";
    os << "best_model = " << r.best_model << "\nmonotone = " << r.monotone << "\n";
    if (!os) throw IoError("write failed for " + path);
}

void write_audit(const AuditReport& a, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    auto rep = [&](const char* tag, const CompatibilityReport& c) {
        os << tag << ".div_residual = " << fmt17(c.div_residual) << "\n";
        os << tag << ".bottom_residual = " << fmt17(c.bottom_residual) << "\n";
        os << tag << ".tangential_residual = " << fmt17(c.tangential_residual) << "\n";
        os << tag << ".pass = " << c.pass() << "\n";
    };
    rep("before", a.before);
    rep("after", a.after);
    os << "u0_norm = " << fmt17(a.u0_norm) << "\nrepaired_norm = " << fmt17(a.repaired_norm) << "\n";
    os << "repair_change = " << fmt17(a.repair_change) << "\nidempotence = " << fmt17(a.idempotence) << "\n";
    os << "p0_norm = " << fmt17(a.p0_norm) << "\naccel_norm = " << fmt17(a.accel_norm) << "\n";
    os << "du_dt_norm = " << fmt17(a.du_dt_norm) << "\neta0_norm = " << fmt17(a.eta0_norm) << "\n";
    if (!os) throw IoError("write failed for " + path);
}

void emit_plots(const PlotInputs& in, const std::string& script_path) {
    for (const std::string* p : {&in.diagnostics, &in.sigma_sweep, &in.kappa_sweep})
        if (!p->empty() && !std::filesystem::exists(*p)) throw IoError("plot input not found: " + *p);
    std::ostringstream s;
    s << "# gnuplot script\n";
    s << "set terminal pngcairo size 900,600\n";
    s << "set datafile separator ','\n";
    s << "set key top right\n";
    if (!in.diagnostics.empty()) {
        s << "\nset output 'energy.png'\n";
        s << "set logscale y\nset xlabel 't'\nset ylabel 'E'\n";
        s << "plot " << quoted(in.diagnostics) << " using 1:($2 > 0 ? $2 : 1/0) every ::1 with lines title 'E'\n";
        s << "unset logscale\n";
    }
    auto sweep = [&](const std::string& path, const char* out, const char* name) {
        if (path.empty()) return;
        s << "\nset output '" << out << "'\n";
        s << "set xlabel '" << name << "'\nset ylabel 'd(" << name << ")'\n";
        if (data_rows(path) == 0) {
            s << "# " << path << " holds no sweep rows\n";
            s << "unset logscale\nset label 1 'no sweep data' at graph 0.5, graph 0.5 center\n";
            s << "plot [0:1][0:1] 1/0 notitle\nunset label 1\n";
            return;
        }
        s << "set logscale xy\n";
        s << "plot " << quoted(path) << " using ($1 > 0 && $2 > 0 ? $1 : 1/0):2 every ::1 with linespoints title 'd("
          << name << ")'\n";
        s << "unset logscale\n";
    };
    sweep(in.sigma_sweep, "sigma_sweep.png", "sigma");
    sweep(in.kappa_sweep, "kappa_sweep.png", "kappa");
    std::ofstream os(script_path);
    if (!os) throw IoError("cannot write " + script_path);
    os << s.str();
    if (!os) throw IoError("write failed for " + script_path);
}

}  // namespace fsw
