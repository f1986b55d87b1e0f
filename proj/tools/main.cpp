#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lowbias/corrections.hpp"
#include "lowbias/errors.hpp"
#include "lowbias/functionals.hpp"
#include "lowbias/montecarlo.hpp"
#include "lowbias/oracle.hpp"
#include "lowbias/sample.hpp"

using namespace lowbias;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::istringstream ss(csv);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
    if (out.empty()) throw CLI::ValidationError("empty list");
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    f << text;
}

struct EstimateOptions {
    std::string functional;
    std::string data_path;
    std::string p_list = "2";
    std::string family = "S";
    double u = 0, c = 0;
    double event_threshold = 0;  // reused by return_period as the event bound
};

int run_estimate(const EstimateOptions& opt) {
    Sample sample = read_sample_file(opt.data_path);
    std::vector<int> orders = parse_int_list(opt.p_list);
    double n = static_cast<double>(sample.size());
    std::ostringstream os;

    std::string name = opt.functional.substr(0, opt.functional.find(':'));
    if (name == "ratio_means" || name == "corr" || name == "corr2") {
        if (sample.dim() != 2) throw std::invalid_argument("functional needs two-column data");
        JointMomentSet jm = joint_central_moments(sample, 4);
        if (name == "ratio_means") {
            JointMomentSet jm6 = joint_central_moments(sample, 6);
            LinearRatio r = linear_ratio(Eigen::Vector2d{1, 0}, Eigen::Vector2d{0, 1}, jm6);
            os << "functional: ratio_means  n=" << sample.size() << "\n";
            os << "plug-in: " << r.value << "\n";
            for (size_t i = 0; i < r.s_series.terms.size(); ++i)
                os << "S_" << i + 1 << ": " << r.s_series.terms[i] << "\n";
            for (int p : orders)
                os << "estimate(p=" << p << "): " << assemble_estimate(r.s_series, n, p) << "\n";
        } else {
            CorrelationEstimates ce = correlation_estimators(jm, n);
            bool squared = (name == "corr2");
            os << "functional: " << name << "  n=" << sample.size() << "\n";
            os << "plug-in: " << (squared ? ce.rho_sq : ce.rho) << "\n";
            os << "T(1^2): " << (squared ? ce.t2_rho_sq : ce.t2_rho) << "\n";
            os << "estimate(2n): " << (squared ? ce.rho_sq_n : ce.rho_n) << "\n";
            os << "estimate(2n-2): " << (squared ? ce.rho_sq_nm1 : ce.rho_nm1) << "\n";
        }
        std::cout << os.str();
        return 0;
    }

    if (name == "return_period") {
        double lower = std::stod(opt.functional.substr(opt.functional.find(':') + 1));
        double a = opt.event_threshold;
        auto below = [a](const Eigen::VectorXd& v) { return v[0] <= a; };
        double p_hat = empirical_probability(sample, below);
        os << "functional: " << opt.functional << "  event: x <= " << a << "  n="
           << sample.size() << "\n";
        os << "event probability: " << p_hat << "\n";
        for (int p : orders) {
            double est = return_period_estimate(p_hat, n, p, lower);
            os << "estimate(p=" << p << "): " << est
               << (p_hat <= lower ? "  [gated at l]" : "") << "\n";
        }
        std::cout << os.str();
        return 0;
    }

    CatalogEntry entry = catalog_entry(opt.functional);
    MomentSet m = central_moments(sample, entry.moment_order);
    double plug = entry.value(m);
    EstimatorFamily family = EstimatorFamily::parse(opt.family);
    CorrectionSeries series = family.kind == EstimatorFamily::Kind::T ? entry.series_t(m)
                                                                      : entry.series_s(m);
    os << "functional: " << opt.functional << "  n=" << sample.size() << "\n";
    os << "plug-in: " << plug << "\n";
    const char* label = family.kind == EstimatorFamily::Kind::T ? "T_" : "S_";
    for (size_t i = 0; i < series.terms.size(); ++i)
        os << label << i + 1 << ": " << series.terms[i] << "\n";
    for (int p : orders) {
        double value = assemble_estimate(series, n, p);
        bool gated = false;
        if (opt.u > 0) {
            double v2 = truncated_estimate(value, plug, opt.u, opt.c);
            gated = (v2 != value);
            value = v2;
        }
        os << "estimate(p=" << p << "): " << value << (gated ? "  [truncated]" : "") << "\n";
    }
    std::cout << os.str();
    return 0;
}

struct SimulateOptions {
    std::string functional;
    std::string dist = "normal:0,1";
    std::string n_list = "10";
    std::string p_list = "1,2";
    long replications = 10000;
    std::uint64_t seed = 1;
    std::string family = "S";
    double u = 0, c = 0;
    int runs = 1;
    int threads = 1;
    bool jackknife = false;
    int bootstrap = 0;
    std::string format = "csv";
    std::string out;
};

int run_simulate(const SimulateOptions& opt) {
    if (opt.replications < 1) throw std::invalid_argument("--N must be >= 1");
    if (opt.runs < 1) throw std::invalid_argument("--runs must be >= 1");
    Distribution dist = Distribution::parse(opt.dist);
    std::vector<ExperimentReport> reports;
    for (int run = 0; run < opt.runs; ++run)
        for (int n : parse_int_list(opt.n_list))
            for (int p : parse_int_list(opt.p_list)) {
                ExperimentConfig cfg;
                cfg.functional_id = opt.functional;
                cfg.dist = dist;
                cfg.n = n;
                cfg.p = p;
                cfg.replications = opt.replications;
                cfg.seed = opt.seed + static_cast<std::uint64_t>(run);
                cfg.family = EstimatorFamily::parse(opt.family);
                cfg.family.u = opt.u;
                cfg.family.c = opt.c;
                cfg.threads = opt.threads;
                cfg.baselines.jackknife = opt.jackknife;
                cfg.baselines.bootstrap = opt.bootstrap;
                reports.push_back(run_bias_experiment(cfg));
            }
    std::string text;
    if (opt.format == "csv") {
        text = "# master-seed=" + std::to_string(opt.seed) + "\n" + reports_to_csv(reports);
    } else if (opt.format == "markdown") {
        text = "master seed: " + std::to_string(opt.seed) + "\n\n" +
               reports_to_markdown(reports);
    } else {
        throw std::invalid_argument("--format must be csv or markdown");
    }
    emit(text, opt.out);
    return 0;
}

struct PlanOptions {
    std::string functional;
    std::string dist;
    int p = 1;
    double eps = 0.1;
    double n = 10;
    double cap = 1e7;
};

int run_plan(const PlanOptions& opt) {
    PlanResult plan =
        plan_simulations(opt.functional, Distribution::parse(opt.dist), opt.n, opt.p, opt.eps);
    if (!plan.defined) {
        std::cout << plan.note << "\n";
        return 0;
    }
    std::printf("phi_%d = %.6g\n", opt.p, plan.phi);
    std::printf("N >= %.6g  (eps=%g, n=%g, p=%d)\n", plan.required, opt.eps, opt.n, opt.p);
    if (plan.required > opt.cap)
        std::printf("warning: N exceeds the practicality cap %.3g; "
                    "bias estimation at this order is impractical\n",
                    opt.cap);
    return 0;
}

struct OracleOptions {
    std::string functional;
    std::string dist;
    int n_min = 4, n_max = 10;
    int p = 2;
    bool use_ue = false;
};

int run_oracle(const OracleOptions& opt) {
    Distribution dist = Distribution::parse(opt.dist);
    if (dist.kind() != Distribution::Kind::Discrete && dist.kind() != Distribution::Kind::Bernoulli)
        throw std::invalid_argument("the oracle needs a finite distribution spec");
    DiscreteDistribution f = dist.kind() == Distribution::Kind::Discrete
                                 ? dist.atoms()
                                 : DiscreteDistribution::univariate({0.0, 1.0}, {0.5, 0.5});

    CatalogEntry entry = catalog_entry(opt.functional);
    MomentSet analytic = f.moments(std::max(4, entry.moment_order));
    double truth = entry.value(analytic);

    auto family = [&](int n) -> SampleStatistic {
        if (opt.use_ue) {
            return [&entry, n](const Sample& s) {
                MomentSet m = central_moments(s, entry.moment_order);
                (void)n;
                std::string id = entry.id;
                int r = std::stoi(id.substr(id.find(':') + 1));
                return central_moment(r, m).unbiased(static_cast<double>(s.size()));
            };
        }
        return [&entry, this_p = opt.p](const Sample& s) {
            MomentSet m = central_moments(s, entry.moment_order);
            return assemble_estimate(entry.series_s(m), static_cast<double>(s.size()), this_p);
        };
    };

    std::vector<BiasPoint> curve = exact_bias_curve(family, f, opt.n_min, opt.n_max, truth);
    double worst = 0;
    std::printf("functional: %s   truth = %.12g\n", opt.functional.c_str(), truth);
    for (const BiasPoint& pt : curve) {
        double scaled = std::abs(pt.bias) * std::pow(pt.n, opt.p);
        worst = std::max(worst, scaled);
        std::printf("n=%2d  exact bias = % .12e   |bias| n^%d = %.6e\n", pt.n, pt.bias, opt.p,
                    scaled);
    }
    if (std::abs(truth) > 0 && worst <= 1e-9 * std::abs(truth) * std::pow(opt.n_max, opt.p)) {
        std::printf("exact bias 0 (<= 1e-9 relative): unbiased at every n in range\n");
    } else {
        double last = std::abs(curve.back().bias) * std::pow(curve.back().n, opt.p);
        bool bounded = last <= 1.25 * worst && std::isfinite(worst);
        std::printf("|bias| n^%d sup = %.6e -> %s\n", opt.p, worst,
                    bounded ? "bounded (order verified)" : "growing (order not reached)");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic bias reduction for plug-in estimators"};
    app.set_config("--config");
    app.require_subcommand(1);

    EstimateOptions est;
    CLI::App* estimate = app.add_subcommand("estimate", "corrected estimates from a data file");
    estimate->add_option("--functional", est.functional, "catalog id")->required();
    estimate->add_option("data", est.data_path, "input data file")->required();
    estimate->add_option("--p", est.p_list, "orders, comma separated (default 2)");
    estimate->add_option("--family", est.family, "S or T (default S)");
    estimate->add_option("--u", est.u, "truncation bound (also the event bound for return_period)");
    estimate->add_option("--c", est.c, "truncation constant");

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "bias experiments against analytic truth");
    simulate->add_option("--functional", sim.functional, "catalog id")->required();
    simulate->add_option("--dist", sim.dist, "distribution spec")->required();
    simulate->add_option("--n", sim.n_list, "sample sizes, comma separated");
    simulate->add_option("--p", sim.p_list, "orders, comma separated");
    simulate->add_option("--N", sim.replications, "replications per cell");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--family", sim.family, "S, T, truncated-S or plus");
    simulate->add_option("--u", sim.u, "truncation bound");
    simulate->add_option("--c", sim.c, "truncation constant");
    simulate->add_option("--runs", sim.runs, "independent runs per cell");
    simulate->add_option("--threads", sim.threads, "worker threads");
    simulate->add_flag("--jackknife", sim.jackknife, "include the jackknife baseline");
    simulate->add_option("--bootstrap", sim.bootstrap, "bootstrap resamples (0 = off)");
    simulate->add_option("--format", sim.format, "csv or markdown");
    simulate->add_option("--out", sim.out, "output path (default stdout)");

    PlanOptions plan;
    CLI::App* planner = app.add_subcommand("plan", "replications needed for bias estimation");
    planner->add_option("--functional", plan.functional, "catalog id")->required();
    planner->add_option("--dist", plan.dist, "distribution spec")->required();
    planner->add_option("--p", plan.p, "order");
    planner->add_option("--eps", plan.eps, "relative error target");
    planner->add_option("--n", plan.n, "sample size");
    planner->add_option("--cap", plan.cap, "practicality warning threshold");

    OracleOptions orc;
    CLI::App* oracle = app.add_subcommand("oracle", "exact bias by enumeration");
    oracle->add_option("--functional", orc.functional, "catalog id")->required();
    oracle->add_option("--dist", orc.dist, "finite distribution spec")->required();
    oracle->add_option("--n-min", orc.n_min, "smallest sample size");
    oracle->add_option("--n-max", orc.n_max, "largest sample size");
    oracle->add_option("--p", orc.p, "order for the scaled-bias verdict");
    oracle->add_flag("--ue", orc.use_ue, "evaluate the exactly unbiased form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*estimate) return run_estimate(est);
        if (*simulate) return run_simulate(sim);
        if (*planner) return run_plan(plan);
        if (*oracle) return run_oracle(orc);
    } catch (const unavailable_error& e) {
        std::cerr << "error (numeric): " << e.what() << "\n";
        return kExitNumeric;
    } catch (const degenerate_error& e) {
        std::cerr << "error (numeric): " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::string what = e.what();
        bool data = what.find("data file") != std::string::npos ||
                    what.find("invalid sample") != std::string::npos ||
                    what.find("malformed") != std::string::npos ||
                    what.find("column count") != std::string::npos;
        std::cerr << (data ? "error (data): " : "error (config): ") << what << "\n";
        return data ? kExitData : kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
