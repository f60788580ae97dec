// pcf: spectra, densities of states and renormalization diagnostics on p.c.f. lattices.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "pcf/pcf.hpp"

namespace fs = std::filesystem;
using namespace pcf;

namespace {

struct Config {
    std::string builtin = "gasket";
    std::string structure_path, base_path, out_dir;
    int n = 3;
    double tol = kDefaultNullTol;
    double merge_tol = kDefaultMergeTol;
    std::string bc = "neumann";
    int kmax = 4;
    int nmax = 30;
    double re_min = -6, re_max = 1, im_min = 0.1, im_max = 1;
    int re_steps = 8, im_steps = 3;
    bool rho = false;
};

struct Problem {
    StructureSpec spec;
    BaseOperator base;
};

Problem load(const Config& c) {
    Problem p;
    if (!c.structure_path.empty()) {
        p.spec = load_structure(c.structure_path);
        if (c.base_path.empty()) throw ConfigError("--structure requires --base");
        p.base = load_base(c.base_path, p.spec.N0);
    } else {
        auto b = builtin(c.builtin);
        p.spec = b.spec;
        p.base = c.base_path.empty() ? b.base : load_base(c.base_path, b.spec.N0);
    }
    return p;
}

void check_valid(const Problem& p) {
    auto s = validate_structure(p.spec);
    auto b = validate_base(p.base, p.spec);
    for (const auto* rep : {&s, &b})
        for (const auto& chk : rep->checks)
            if (!chk.passed) throw ValidationError(chk.name + (chk.detail.empty() ? "" : ": " + chk.detail));
}

bool is_gasket(const Problem& p) {
    auto g = gasket_spec();
    return p.spec.N == 3 && p.spec.N0 == 3 && closed_relation(p.spec) == closed_relation(g);
}

bool is_interval(const Problem& p) { return p.spec.N == 2 && p.spec.N0 == 2; }

std::string canonical(const std::string& cmd, const Config& c) {
    std::ostringstream s;
    s << cmd << '|' << (c.structure_path.empty() ? "builtin:" + c.builtin : c.structure_path) << '|' << c.base_path
      << "|n=" << c.n << "|tol=" << fmt_double(c.tol) << "|merge=" << fmt_double(c.merge_tol) << "|bc=" << c.bc
      << "|kmax=" << c.kmax << "|nmax=" << c.nmax << "|grid=" << fmt_double(c.re_min) << ',' << fmt_double(c.re_max) << ','
      << c.re_steps << ',' << fmt_double(c.im_min) << ',' << fmt_double(c.im_max) << ',' << c.im_steps;
    return s.str();
}

// Writes to --out/<file> when an output directory is set, else to stdout.
class Sink {
public:
    Sink(const Config& c, const std::string& file) {
        if (c.out_dir.empty()) return;
        fs::create_directories(c.out_dir);
        file_ = std::make_unique<std::ofstream>(fs::path(c.out_dir) / file);
        if (!*file_) throw ConfigError("cannot write " + (fs::path(c.out_dir) / file).string());
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void header(std::ostream& o, const std::string& cmd, const Config& c) {
    o << "# pcf " << cmd << " config=" << config_hash(canonical(cmd, c)) << " tol=" << fmt_double(c.tol)
      << " merge_tol=" << fmt_double(c.merge_tol) << '\n';
}

void write_measure(std::ostream& o, const AtomicMeasure& m, const char* cols) {
    o << cols << '\n';
    for (const auto& a : m.atoms) o << fmt_double(a.location) << ',' << fmt_double(a.mass) << '\n';
}

LevelOperator level(const Problem& p, int n) { return assemble(p.base, p.spec, build_level(p.spec, n)); }

Boundary parse_bc(const std::string& s) {
    if (s == "neumann") return Boundary::neumann;
    if (s == "dirichlet") return Boundary::dirichlet;
    throw ConfigError("--bc must be neumann or dirichlet");
}

int cmd_validate(const Config& c) {
    auto p = load(c);
    auto s = validate_structure(p.spec);
    auto b = validate_base(p.base, p.spec);
    int passed = 0, total = 0;
    for (const auto* rep : {&s, &b})
        for (const auto& chk : rep->checks) {
            std::cout << (chk.passed ? "PASS " : "FAIL ") << chk.name;
            if (!chk.detail.empty()) std::cout << " (" << chk.detail << ')';
            std::cout << '\n';
            ++total;
            passed += chk.passed;
        }
    std::cout << "structure " << p.spec.name << ": " << (s.ok() ? "valid" : "invalid") << ", "
              << std::count_if(s.checks.begin(), s.checks.end(), [](auto& k) { return k.passed; }) << " of "
              << s.checks.size() << " axioms passed\n";
    return passed == total ? 0 : 2;
}

int cmd_spectrum(const Config& c) {
    auto p = load(c);
    check_valid(p);
    auto m = counting_measure(spectrum(level(p, c.n), parse_bc(c.bc)), c.merge_tol);
    Sink sink(c, "spectrum_" + c.bc + "_n" + std::to_string(c.n) + ".csv");
    header(sink.out(), "spectrum", c);
    write_measure(sink.out(), m, "lambda,multiplicity");
    return 0;
}

int cmd_nd(const Config& c) {
    auto p = load(c);
    check_valid(p);
    auto nd = nd_spectrum(level(p, c.n), c.tol, c.merge_tol);
    {
        Sink sink(c, "nd_n" + std::to_string(c.n) + ".csv");
        header(sink.out(), "nd", c);
        write_measure(sink.out(), nd, "lambda,multiplicity");
    }
    if (c.rho || !c.out_dir.empty()) {
        // rho_k at the level-n N-D eigenvalues for every k <= n.
        Sink sink(c, "rho_n" + std::to_string(c.n) + ".csv");
        header(sink.out(), "nd-rho", c);
        sink.out() << "lambda,n,rho\n";
        for (const auto& a : nd.atoms)
            for (int k = 0; k <= c.n; ++k)
                sink.out() << fmt_double(a.location) << ',' << k << ','
                           << nd_nullity_stacked(level(p, k), a.location, c.tol) << '\n';
    }
    return 0;
}

int cmd_dos(const Config& c) {
    auto p = load(c);
    check_valid(p);
    const double scale = std::pow(static_cast<double>(p.spec.N), -c.n);
    auto m = counting_measure(spectrum(level(p, c.n), parse_bc(c.bc)), c.merge_tol).scaled(scale);
    Sink sink(c, "dos_" + c.bc + "_n" + std::to_string(c.n) + ".csv");
    header(sink.out(), "dos", c);
    sink.out() << "lambda,cdf\n";
    for (const auto& a : m.atoms) sink.out() << fmt_double(a.location) << ',' << fmt_double(m.cdf(a.location)) << '\n';
    return 0;
}

int cmd_green(const Config& c) {
    auto p = load(c);
    check_valid(p);
    if (c.re_steps < 1 || c.im_steps < 1) throw ConfigError("grid steps must be positive");
    RenormContext ctx(p.spec);
    Sink sink(c, "green.csv");
    header(sink.out(), "green", c);
    sink.out() << "re_lambda,im_lambda,value,iters,tail\n";
    auto axis = [](double lo, double hi, int steps, int k) { return steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1); };
    for (int i = 0; i < c.im_steps; ++i)
        for (int r = 0; r < c.re_steps; ++r) {
            const std::complex<double> lam(axis(c.re_min, c.re_max, c.re_steps, r), axis(c.im_min, c.im_max, c.im_steps, i));
            auto g = green_estimate(ctx, phi<std::complex<double>>(p.base, lam), c.nmax);
            sink.out() << fmt_double(lam.real()) << ',' << fmt_double(lam.imag()) << ',' << fmt_double(g.value) << ','
                       << g.iterations << ',' << fmt_double(g.tail_bound) << '\n';
        }
    return 0;
}

int cmd_gasket_measure(const Config& c) {
    auto p = load(c);
    check_valid(p);
    if (!is_gasket(p)) throw ConfigError("gasket-measure needs the gasket structure");
    auto lim = gasket_limit_measure(c.kmax, c.merge_tol);
    auto est = mu_nd_estimate(p.spec, p.base, c.n, c.tol, c.merge_tol);
    double worst = 0;
    int unmatched = 0, excess = 0;
    for (const auto& a : est.atoms) {
        double best = std::numeric_limits<double>::infinity();
        const Atom* hit = nullptr;
        for (const auto& b : lim.measure.atoms)
            if (std::abs(a.location - b.location) < best) {
                best = std::abs(a.location - b.location);
                hit = &b;
            }
        worst = std::max(worst, best);
        if (best > 1e-7) ++unmatched;
        else if (a.mass > hit->mass + 1e-12) ++excess;
    }
    {
        Sink sink(c, "gasket_measure_k" + std::to_string(c.kmax) + ".csv");
        header(sink.out(), "gasket-measure", c);
        write_measure(sink.out(), lim.measure, "location,mass");
    }
    std::ostream& o = c.out_dir.empty() ? std::cerr : std::cout;
    o << "level n=" << c.n << " N-D atoms: " << est.atoms.size() << ", limit atoms (k<=" << c.kmax
      << "): " << lim.measure.atoms.size() << '\n'
      << "max atom-location mismatch: " << fmt_double(worst) << '\n'
      << "atoms without a limit match within 1e-7: " << unmatched << '\n'
      << "atoms with mass above the limit mass: " << excess << '\n'
      << "total mass nu^ND/3^n: " << fmt_double(est.total()) << '\n'
      << "total mass limit (truncated): " << fmt_double(lim.measure.total()) << " (deficit " << fmt_double(lim.deficit.get_d())
      << ", full 1.5)\n"
      << "mass at -3: " << fmt_double(est.mass_near(-3.0, 1e-7)) << " vs 0.5\n";
    return 0;
}

int cmd_degrees(const Config& c) {
    auto p = load(c);
    check_valid(p);
    std::vector<DegreeMatrix> rows;
    std::vector<int> one_d;
    if (is_gasket(p)) {
        rows = bidegree_sequence(gasket_g(), c.n);
        one_d = compose_reduce_1d(gasket_ghat(), c.n).degrees;
    } else if (is_interval(p) && p.spec.alpha[0].exact) {
        one_d = interval_rhat_degrees(p.spec.alpha[0].q, c.n);
        for (int d : one_d) rows.push_back(DegreeMatrix::of(d, 0, 0, 0));
    } else {
        throw ConfigError("degree tables are available for the gasket and the interval");
    }
    Sink sink(c, "degrees_n" + std::to_string(c.n) + ".csv");
    header(sink.out(), "degrees", c);
    sink.out() << "n,d00,d01,d10,d11,l_n,l_n^{1/n}\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& d = rows[k].d;
        sink.out() << k + 1 << ',' << d[0][0] << ',' << d[0][1] << ',' << d[1][0] << ',' << d[1][1] << ','
                   << fmt_double(rows[k].l) << ',' << fmt_double(std::pow(rows[k].l, 1.0 / static_cast<double>(k + 1))) << '\n';
    }
    std::vector<double> l(one_d.begin(), one_d.end());
    auto est = dynamical_degree(l);
    auto verdict = dichotomy_classify(est.d_inf, p.spec.N);
    sink.out() << "# one-variable degrees:";
    for (int d : one_d) sink.out() << ' ' << d;
    sink.out() << "\n# d_inf=" << fmt_double(est.d_inf) << " N=" << p.spec.N << " verdict=" << to_string(verdict) << '\n';
    return 0;
}

int cmd_decimation(const Config& c) {
    auto p = load(c);
    check_valid(p);
    if (!is_gasket(p)) throw ConfigError("decimation applies to the gasket");
    auto r = decimation_check(p.spec, p.base, c.n, c.merge_tol);
    std::cout << "phat(Dirichlet spectrum at n=" << c.n + 1 << ") inside Dirichlet+Neumann spectrum at n=" << c.n
              << "\nchecked " << r.checked << ", excluded " << r.excluded << ", violations " << r.violations
              << ", max mismatch " << fmt_double(r.max_mismatch) << '\n';
    return r.violations == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra and renormalization on finitely ramified self-similar lattices"};
    app.require_subcommand(1);
    Config c;
    auto common = [&](CLI::App* s) {
        s->add_option("--builtin", c.builtin, "gasket or interval:<alpha>");
        s->add_option("--structure", c.structure_path, "structure JSON")->check(CLI::ExistingFile);
        s->add_option("--base", c.base_path, "base operator JSON")->check(CLI::ExistingFile);
        s->add_option("--n", c.n, "level")->check(CLI::Range(0, 12));
        s->add_option("--out", c.out_dir, "output directory");
        s->add_option("--tol", c.tol, "nullity tolerance")->check(CLI::PositiveNumber);
        s->add_option("--merge-tol", c.merge_tol, "eigenvalue merge tolerance")->check(CLI::PositiveNumber);
    };
    std::vector<std::pair<CLI::App*, int (*)(const Config&)>> cmds;
    auto add = [&](const char* name, const char* help, int (*fn)(const Config&)) {
        auto* s = app.add_subcommand(name, help);
        common(s);
        cmds.emplace_back(s, fn);
        return s;
    };
    add("validate", "check the structure axioms", cmd_validate);
    add("spectrum", "Neumann or Dirichlet counting measure", cmd_spectrum)->add_option("--bc", c.bc, "neumann or dirichlet");
    add("nd", "Neumann-Dirichlet spectrum", cmd_nd)->add_flag("--rho", c.rho, "print the rho_k table");
    add("dos", "normalized counting measure CDF", cmd_dos)->add_option("--bc", c.bc, "neumann or dirichlet");
    auto* green = add("green", "Green function on a complex grid", cmd_green);
    green->add_option("--nmax", c.nmax, "renormalization steps")->check(CLI::Range(1, 200));
    green->add_option("--re-min", c.re_min, "grid bounds and sizes");
    green->add_option("--re-max", c.re_max);
    green->add_option("--re-steps", c.re_steps);
    green->add_option("--im-min", c.im_min);
    green->add_option("--im-max", c.im_max);
    green->add_option("--im-steps", c.im_steps);
    add("gasket-measure", "truncated limit measure vs nu^ND/3^n", cmd_gasket_measure)
        ->add_option("--kmax", c.kmax, "depth of the truncated limit measure")
        ->check(CLI::Range(0, 20));
    add("degrees", "degree sequences and the dichotomy verdict", cmd_degrees);
    add("decimation", "spectral decimation containment", cmd_decimation);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        for (auto& [sub, fn] : cmds)
            if (sub->parsed()) return fn(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation failed: " << e.what() << '\n';
        return 2;
    } catch (const CeilingError& e) {
        std::cerr << "ceiling exceeded: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 1;
}
