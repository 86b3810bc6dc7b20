#include "gek/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gek/checks.hpp"
#include "gek/errors.hpp"
#include "gek/finite_n.hpp"
#include "gek/io.hpp"
#include "gek/limits.hpp"
#include "gek/sampler.hpp"

namespace gek::cli {

namespace fn = gek::finite_n;
namespace lm = gek::limits;
namespace sp = gek::sampler;

namespace {

struct CommonOpts {
    int beta = 2;
    std::string regime = "limit";
    int n = 0;
    std::optional<double> tau;
    std::optional<double> sigma;
    std::string out;
    std::string format = "csv";
};

std::string echo_command(int argc, const char* const* argv) {
    std::ostringstream ss;
    for (int i = 0; i < argc; ++i) ss << (i ? " " : "") << argv[i];
    return ss.str();
}

void stamp_meta(io::CurveRecord& rec, const CommonOpts& o, const std::string& command,
                std::uint64_t seed) {
    rec.add_meta("version", io::kVersion);
    rec.add_meta("command", command);
    rec.add_meta("beta", std::to_string(o.beta));
    rec.add_meta("regime", o.regime);
    rec.add_meta("n", o.n > 0 ? std::to_string(o.n) : "limit");
    if (o.tau) rec.add_meta("tau", io::format_double(*o.tau));
    if (o.sigma) rec.add_meta("sigma", io::format_double(*o.sigma));
    rec.add_meta("seed", std::to_string(seed));
}

void emit(const io::CurveRecord& rec, const std::string& out, const std::string& format) {
    if (out.empty()) {
        if (format == "json")
            io::write_json(rec, std::cout);
        else
            io::write_csv(rec, std::cout);
    } else {
        io::write_file(rec, out, format);
    }
}

void require_regime_params(const CommonOpts& o) {
    bool needs_sigma = (o.regime == "limit" || o.regime == "bulk");
    bool is_finite = (o.regime == "finite");
    if (is_finite) {
        if (!o.tau) throw CLI::ValidationError("--tau", "finite regime requires --tau");
        if (o.sigma)
            throw CLI::ValidationError("--sigma", "finite regime takes --tau, not --sigma");
        if (o.n <= 0) throw CLI::ValidationError("--n", "finite regime requires --n");
    } else if (needs_sigma) {
        if (!o.sigma)
            throw CLI::ValidationError("--sigma", o.regime + " regime requires --sigma");
        if (o.tau)
            throw CLI::ValidationError("--tau", o.regime + " regime takes --sigma, not --tau");
    } else { // hermitian, strong: parameter-free limits
        if (o.tau || o.sigma)
            throw CLI::ValidationError(
                "--tau/--sigma", o.regime + " regime is parameter-free (sigma -> 0 or inf)");
    }
}

// density dispatch over (beta, regime, channel)
double density_value(const CommonOpts& o, bool real_channel, complex z) {
    if (o.regime == "finite") {
        fn::EnsembleSpec s{o.beta, o.n, *o.tau};
        if (o.beta == 2) return fn::kernel_b2(z, std::conj(z), s).real();
        if (o.beta == 4) {
            complex up = z.imag() < 0 ? std::conj(z) : z;
            return fn::kernel_b4(up, std::conj(up), s).real();
        }
        if (real_channel) return -fn::g_real_b1({z.real(), 0.0}, z.real(), s).real();
        return -fn::g_complex_b1(z, z, s).real();
    }
    if (o.regime == "limit") {
        double sg = *o.sigma;
        if (o.beta == 2) return lm::density_ai_b2(z, sg);
        if (o.beta == 4) return lm::density_ai_b4_im_form(z, sg);
        if (real_channel) return lm::density_ai_real_b1(z.real(), sg);
        return lm::density_ai_complex_b1(z, sg);
    }
    if (o.regime == "hermitian") {
        if (o.beta == 2) return lm::hermitian_density_b2(z.real());
        if (o.beta == 4) return lm::hermitian_density_b4(z.real());
        if (real_channel) return lm::hermitian_density_real_b1(z.real());
        return 0.0; // the beta = 1 complex density vanishes as sigma -> 0
    }
    if (o.regime == "strong") {
        if (o.beta == 2) return lm::strong_edge_density_b2(z);
        if (o.beta == 4) return lm::strong_edge_density_b4(z);
        if (real_channel) return lm::strong_edge_density_real_b1(z.real());
        return lm::strong_edge_density_complex_b1(z);
    }
    if (o.regime == "bulk") return lm::bulk_sine_kernel(z, std::conj(z), *o.sigma).real();
    throw CLI::ValidationError("--regime", "unknown regime: " + o.regime);
}

int cmd_density(const CommonOpts& o, const std::string& grid, const std::string& ygrid,
                std::optional<double> y, const std::string& channel,
                const std::string& command) {
    require_regime_params(o);
    bool real_channel = (channel == "real");
    if (real_channel && o.beta != 1)
        throw CLI::ValidationError("--channel", "real-axis channel needs beta = 1");
    io::GridSpec gx = io::GridSpec::parse(grid);

    io::CurveRecord rec;
    stamp_meta(rec, o, command, 0);
    rec.add_meta("channel", real_channel ? "real" : "complex");

    bool two_d = !ygrid.empty() && !real_channel;
    if (two_d) {
        io::GridSpec gy = io::GridSpec::parse(ygrid);
        rec.columns = {"x", "y", "density"};
        for (double xv : gx.points())
            for (double yv : gy.points())
                rec.rows.push_back({xv, yv, density_value(o, false, {xv, yv})});
    } else {
        double yv = y.value_or(0.0);
        rec.columns = real_channel ? std::vector<std::string>{"x", "density"}
                                   : std::vector<std::string>{"x", "y", "density"};
        for (double xv : gx.points()) {
            double d = density_value(o, real_channel, {xv, yv});
            if (real_channel)
                rec.rows.push_back({xv, d});
            else
                rec.rows.push_back({xv, yv, d});
        }
    }
    emit(rec, o.out, o.format);
    return 0;
}

complex parse_point(const std::string& text) {
    size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--z", "expected RE,IM, got '" + text + "'");
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

void push_component(io::CurveRecord& rec, std::vector<double>& row, const std::string& name,
                    complex v) {
    rec.columns.push_back(name + "_re");
    rec.columns.push_back(name + "_im");
    row.push_back(v.real());
    row.push_back(v.imag());
}

int cmd_kernel(const CommonOpts& o, const std::string& z1s, const std::string& z2s,
               const std::string& command) {
    require_regime_params(o);
    complex z1 = parse_point(z1s), z2 = parse_point(z2s);

    io::CurveRecord rec;
    stamp_meta(rec, o, command, 0);
    rec.add_meta("z1", z1s);
    rec.add_meta("z2", z2s);
    std::vector<double> row;

    if (o.regime == "finite") {
        fn::EnsembleSpec s{o.beta, o.n, *o.tau};
        if (o.beta == 2) {
            push_component(rec, row, "kernel", fn::kernel_b2(z1, z2, s));
        } else if (o.beta == 4) {
            fn::MatrixKernelB4 b = fn::matrix_kernel_b4(z1, z2, s);
            push_component(rec, row, "k11", b.k11);
            push_component(rec, row, "k12", b.k12);
            push_component(rec, row, "k21", b.k21);
            push_component(rec, row, "k22", b.k22);
        } else {
            fn::MatrixKernelB1 b = fn::matrix_kernel_b1(z1, z2, s);
            push_component(rec, row, "khat", b.khat);
            push_component(rec, row, "g_real", b.g_real);
            push_component(rec, row, "g_complex", b.g_complex);
            push_component(rec, row, "w_rr", {b.w_rr, 0.0});
            push_component(rec, row, "w_rc_1", b.w_rc_1);
            push_component(rec, row, "w_rc_2", b.w_rc_2);
            push_component(rec, row, "w_cc", b.w_cc);
        }
    } else if (o.regime == "limit") {
        double sg = *o.sigma;
        if (o.beta == 2) {
            push_component(rec, row, "kernel_ai", lm::kernel_ai_b2(z1, z2, sg));
        } else if (o.beta == 4) {
            push_component(rec, row, "kernel_ai", lm::kernel_ai_b4(z1, z2, sg));
        } else {
            push_component(rec, row, "khat_ai", lm::prekernel_ai_b1(z1, z2, sg));
            push_component(rec, row, "g_real_ai", lm::g_ai_real_b1(z1, z2.real(), sg));
            push_component(rec, row, "g_complex_ai", lm::g_ai_complex_b1(z1, z2, sg));
            push_component(rec, row, "w_rr_ai",
                           {lm::w_ai_rr_b1(z1.real(), z2.real(), sg), 0.0});
        }
    } else if (o.regime == "hermitian") {
        if (o.beta == 2) {
            push_component(rec, row, "kernel_herm",
                           {lm::hermitian_airy_kernel(z1.real(), z2.real()), 0.0});
        } else if (o.beta == 4) {
            lm::HermitianElementsB4 e = lm::hermitian_elements_b4(z1.real(), z2.real());
            push_component(rec, row, "t1", {e.t1, 0.0});
            push_component(rec, row, "t2", {e.t2, 0.0});
            push_component(rec, row, "t3", {e.t3, 0.0});
            push_component(rec, row, "t4", {e.t4, 0.0});
        } else {
            lm::HermitianElementsB1 e = lm::hermitian_elements_b1(z1.real(), z2.real());
            push_component(rec, row, "khat0", {e.khat0, 0.0});
            push_component(rec, row, "g0", {e.g0, 0.0});
            push_component(rec, row, "wrr0", {e.wrr0, 0.0});
        }
    } else if (o.regime == "strong") {
        if (o.beta == 2) {
            push_component(rec, row, "kernel_edge", lm::strong_edge_kernel_b2(z1, z2));
        } else if (o.beta == 4) {
            push_component(rec, row, "kernel_edge", lm::strong_edge_kernel_b4(z1, z2));
        } else {
            lm::StrongEdgeB1 e = lm::strong_edge_elements_b1(z1, z2);
            push_component(rec, row, "khat", e.khat);
            push_component(rec, row, "g_real", e.g_real);
            push_component(rec, row, "g_complex", e.g_complex);
            push_component(rec, row, "w_rr", {e.w_rr, 0.0});
            push_component(rec, row, "w_rc", e.w_rc);
            push_component(rec, row, "w_cc", e.w_cc);
        }
    } else if (o.regime == "bulk") {
        push_component(rec, row, "kernel_bulk", lm::bulk_sine_kernel(z1, z2, *o.sigma));
    } else {
        throw CLI::ValidationError("--regime", "unknown regime: " + o.regime);
    }
    rec.rows.push_back(std::move(row));
    emit(rec, o.out, o.format);
    return 0;
}

int cmd_check(const std::string& suite, const std::string& out, const std::string& format,
              const std::string& command) {
    std::vector<checks::CheckResult> results;
    try {
        results = checks::run_suite(suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    for (const auto& r : results)
        std::printf("%s %-42s residual=%.3e tol=%.1e (%.2fs)\n", r.pass ? "PASS" : "FAIL",
                    r.name.c_str(), r.measured, r.tolerance, r.seconds);
    if (!out.empty()) {
        io::CurveRecord rec;
        rec.add_meta("version", io::kVersion);
        rec.add_meta("command", command);
        rec.add_meta("suite", suite);
        rec.columns = {"pass", "residual", "tolerance", "seconds"};
        for (const auto& r : results) {
            rec.add_meta("check." + std::to_string(rec.rows.size()), r.name);
            rec.rows.push_back({r.pass ? 1.0 : 0.0, r.measured, r.tolerance, r.seconds});
        }
        io::write_file(rec, out, format);
    }
    return checks::all_pass(results) ? 0 : 3;
}

struct SampleOpts {
    CommonOpts common;
    int trials = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string grid, ygrid;
    std::string channel = "complex";
    std::string compare = "none";
    std::string hist_out;
    double window = 10.0;
    bool gumbel = false;
};

double analytic_density(const SampleOpts& so, bool real_channel, complex Z, double sigma,
                        const fn::EnsembleSpec& spec) {
    if (so.compare == "limit") {
        if (spec.beta == 2) return lm::density_ai_b2(Z, sigma);
        if (spec.beta == 4) return lm::density_ai_b4_im_form(Z, sigma);
        if (real_channel) return lm::density_ai_real_b1(Z.real(), sigma);
        return lm::density_ai_complex_b1(Z, sigma);
    }
    // finite: evaluate the exact finite-N density at the unscaled point
    double n = spec.n;
    double edge = (1.0 + spec.tau) * std::sqrt(n);
    double mag = std::pow(n, 1.0 / 6.0);
    complex z = edge + Z / mag;
    if (spec.beta == 2)
        return fn::kernel_b2(z, std::conj(z), spec).real() / std::pow(n, 1.0 / 3.0);
    if (spec.beta == 4) {
        complex up = z.imag() < 0 ? std::conj(z) : z;
        return fn::kernel_b4(up, std::conj(up), spec).real() / std::pow(n, 1.0 / 3.0);
    }
    if (real_channel)
        return -fn::g_real_b1({z.real(), 0.0}, z.real(), spec).real() / std::pow(n, 1.0 / 6.0);
    return -fn::g_complex_b1(z, z, spec).real() / std::pow(n, 1.0 / 3.0);
}

int cmd_sample(const SampleOpts& so, const std::string& command) {
    const CommonOpts& o = so.common;
    if (o.n <= 0) throw CLI::ValidationError("--n", "sample requires --n");
    if (!o.tau && !o.sigma)
        throw CLI::ValidationError("--tau", "sample requires --tau or --sigma");
    if (o.tau && o.sigma)
        throw CLI::ValidationError("--tau", "--tau and --sigma are mutually exclusive");

    double tau, sigma;
    if (o.tau) {
        tau = *o.tau;
        sigma = std::sqrt(std::max(0.0, (1.0 - tau) * std::cbrt(static_cast<double>(o.n))));
    } else {
        sigma = *o.sigma;
        tau = 1.0 - sigma * sigma / std::cbrt(static_cast<double>(o.n));
        if (tau < 0.0)
            throw CLI::ValidationError("--sigma", "sigma too large for this n (tau < 0)");
    }
    fn::EnsembleSpec spec{o.beta, o.n, tau};
    spec.validate();
    if (so.gumbel && tau != 0.0)
        throw CLI::ValidationError("--gumbel", "the Gumbel experiment requires --tau 0");

    sp::SampleBatch batch = sp::sample_batch(spec, so.seed, so.trials, so.threads);

    if (!o.out.empty()) {
        io::CurveRecord rec;
        CommonOpts om = o;
        om.tau = tau;
        stamp_meta(rec, om, command, so.seed);
        rec.add_meta("trials", std::to_string(so.trials));
        rec.add_meta("channel_codes", "0:complex 1:real");
        rec.columns = {"trial", "re", "im", "channel"};
        double thresh = batch.real_axis_threshold();
        for (int t = 0; t < batch.trials; ++t)
            for (complex z : batch.eigenvalues[t]) {
                double ch =
                    (spec.beta == 1 && std::abs(z.imag()) <= thresh) ? 1.0 : 0.0;
                rec.rows.push_back({static_cast<double>(t), z.real(), z.imag(), ch});
            }
        io::write_file(rec, o.out, o.format);
    }

    if (so.gumbel) {
        std::vector<double> maxima(batch.trials);
        for (int t = 0; t < batch.trials; ++t) {
            double mx = -1e300;
            for (complex z : batch.eigenvalues[t]) mx = std::max(mx, z.real());
            maxima[t] = mx;
        }
        sp::GumbelFit fit = sp::fit_gumbel(std::move(maxima));
        std::printf("gumbel beta=%d n=%d trials=%d location=%.6f scale=%.6f ks=%.5f p=%.5f\n",
                    spec.beta, spec.n, so.trials, fit.location, fit.scale, fit.ks_statistic,
                    fit.p_value);
        if (fit.p_value <= 0.01) return 3;
    }

    if (!so.hist_out.empty()) {
        if (so.grid.empty())
            throw CLI::ValidationError("--grid", "histogram output needs --grid");
        bool real_channel = (so.channel == "real");
        io::GridSpec gx = io::GridSpec::parse(so.grid);
        io::GridSpec gy{-3.0, 3.0, 25};
        if (!so.ygrid.empty()) gy = io::GridSpec::parse(so.ygrid);
        sp::Channel ch = real_channel ? sp::Channel::real_axis : sp::Channel::complex_plane;
        // grid points define bin edges: steps points -> steps - 1 bins
        sp::EdgeHistogram h = sp::accumulate_density(
            batch, gx.min, gx.max, gx.steps - 1, gy.min, gy.max,
            real_channel ? 0 : gy.steps - 1, ch, sp::Side::right, so.window);

        io::CurveRecord rec;
        CommonOpts om = o;
        om.tau = tau;
        om.sigma = sigma;
        stamp_meta(rec, om, command, so.seed);
        rec.add_meta("trials", std::to_string(so.trials));
        rec.add_meta("channel", so.channel);
        rec.add_meta("window", io::format_double(so.window));
        bool with_compare = (so.compare != "none");
        rec.columns = real_channel ? std::vector<std::string>{"x", "density", "stat_error"}
                                   : std::vector<std::string>{"x", "y", "density", "stat_error"};
        if (with_compare) {
            rec.columns.push_back("analytic");
            rec.columns.push_back("zscore");
        }
        int bad_bins = 0, counted = 0;
        for (int ix = 0; ix < h.nx; ++ix) {
            int ny_eff = std::max(h.ny, 1);
            for (int iy = 0; iy < ny_eff; ++iy) {
                std::vector<double> row;
                row.push_back(h.x_center(ix));
                if (!real_channel) row.push_back(h.y_center(iy));
                double d = h.density(ix, iy), e = h.error(ix, iy);
                row.push_back(d);
                row.push_back(e);
                if (with_compare) {
                    complex Z{h.x_center(ix), real_channel ? 0.0 : h.y_center(iy)};
                    double a = analytic_density(so, real_channel, Z, sigma, spec);
                    double z = (e > 0.0) ? (d - a) / e : 0.0;
                    row.push_back(a);
                    row.push_back(z);
                    if (e > 0.0) {
                        ++counted;
                        if (std::abs(z) >= 3.0) ++bad_bins;
                    }
                }
                rec.rows.push_back(std::move(row));
            }
        }
        if (with_compare && counted > 0) {
            double frac = 1.0 - static_cast<double>(bad_bins) / counted;
            rec.add_meta("bins_within_3sigma", io::format_double(frac));
            std::printf("histogram bins within 3 sigma: %.1f%% (%d of %d)\n", 100.0 * frac,
                        counted - bad_bins, counted);
        }
        io::write_file(rec, so.hist_out, o.format);
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_regime = true) {
    cmd->add_option("--beta", o.beta, "Dyson index")->check(CLI::IsMember({1, 2, 4}));
    if (with_regime)
        cmd->add_option("--regime", o.regime, "evaluation regime")
            ->check(CLI::IsMember({"finite", "limit", "hermitian", "strong", "bulk"}));
    cmd->add_option("--n", o.n, "matrix size (complex eigenvalue count)");
    cmd->add_option("--tau", o.tau, "non-Hermiticity parameter, finite N");
    cmd->add_option("--sigma", o.sigma, "weak non-Hermiticity parameter, limits");
    cmd->add_option("--out", o.out, "output path (stdout if omitted)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"elliptic Ginibre edge kernels: densities, identity checks, sampling"};
    app.require_subcommand(1);
    std::string command = echo_command(argc, argv);

    CommonOpts dens_opts;
    std::string dens_grid, dens_ygrid, dens_channel = "complex";
    std::optional<double> dens_y;
    CLI::App* dens = app.add_subcommand("density", "evaluate a density on a grid");
    add_common(dens, dens_opts);
    dens->add_option("--grid", dens_grid, "X grid MIN:MAX:STEPS")->required();
    dens->add_option("--ygrid", dens_ygrid, "Y grid MIN:MAX:STEPS");
    dens->add_option("--y", dens_y, "single Y value");
    dens->add_option("--channel", dens_channel, "eigenvalue channel (beta = 1)")
        ->check(CLI::IsMember({"complex", "real"}));

    CommonOpts kern_opts;
    std::string kz1 = "0,0", kz2 = "1,0";
    CLI::App* kern = app.add_subcommand("kernel", "evaluate kernel elements at a point pair");
    add_common(kern, kern_opts);
    kern->add_option("--z1", kz1, "first argument RE,IM")->required();
    kern->add_option("--z2", kz2, "second argument RE,IM")->required();

    std::string suite = "all", check_out, check_format = "csv";
    CLI::App* chk = app.add_subcommand("check", "run identity/limit check suites");
    chk->add_option("suite", suite, "identities|hermitian|strong|bulk|poisson|all");
    chk->add_option("--out", check_out, "write machine-readable results");
    chk->add_option("--format", check_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    SampleOpts so;
    CLI::App* smp = app.add_subcommand("sample", "Monte Carlo eigenvalue sampling");
    add_common(smp, so.common, /*with_regime=*/false);
    smp->add_option("--trials", so.trials, "number of matrix draws")->check(CLI::PositiveNumber);
    smp->add_option("--seed", so.seed, "RNG seed");
    smp->add_option("--threads", so.threads, "worker threads (0 = auto)");
    smp->add_option("--grid", so.grid, "histogram X grid MIN:MAX:STEPS");
    smp->add_option("--ygrid", so.ygrid, "histogram Y grid MIN:MAX:STEPS");
    smp->add_option("--channel", so.channel, "complex|real")
        ->check(CLI::IsMember({"complex", "real"}));
    smp->add_option("--compare", so.compare, "analytic comparison column")
        ->check(CLI::IsMember({"none", "limit", "finite"}));
    smp->add_option("--hist-out", so.hist_out, "histogram output path");
    smp->add_option("--window", so.window, "microscopic retention window");
    smp->add_flag("--gumbel", so.gumbel, "largest-real-part Gumbel experiment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (dens->parsed())
            return cmd_density(dens_opts, dens_grid, dens_ygrid, dens_y, dens_channel, command);
        if (kern->parsed()) return cmd_kernel(kern_opts, kz1, kz2, command);
        if (chk->parsed()) return cmd_check(suite, check_out, check_format, command);
        if (smp->parsed()) return cmd_sample(so, command);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace gek::cli
