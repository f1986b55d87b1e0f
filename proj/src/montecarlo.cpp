#include "lowbias/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lowbias/corrections.hpp"
#include "lowbias/errors.hpp"
#include "lowbias/moments.hpp"

namespace lowbias {

EstimatorFamily EstimatorFamily::parse(const std::string& name) {
    EstimatorFamily f;
    if (name == "S" || name == "s")
        f.kind = Kind::S;
    else if (name == "T" || name == "t")
        f.kind = Kind::T;
    else if (name == "truncated-S" || name == "truncated" || name == "trunc")
        f.kind = Kind::TruncatedS;
    else if (name == "plus")
        f.kind = Kind::Plus;
    else
        throw std::invalid_argument("unknown estimator family: " + name);
    return f;
}

std::string EstimatorFamily::name() const {
    switch (kind) {
        case Kind::S:
            return "S";
        case Kind::T:
            return "T";
        case Kind::TruncatedS:
            return "truncated-S";
        case Kind::Plus:
            return "plus";
    }
    return "?";
}

namespace {

double reduce_mean(const std::vector<double>& v) {
    Eigen::Map<const Eigen::VectorXd> map(v.data(), static_cast<Eigen::Index>(v.size()));
    return compensated_sum(map) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (static_cast<double>(v.size()) - 1.0) /
                     static_cast<double>(v.size()));
}

}  // namespace

ExperimentReport run_bias_experiment(const ExperimentConfig& config) {
    if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (config.n < config.p) throw std::invalid_argument("sample size must satisfy n >= p");

    CatalogEntry entry = catalog_entry(config.functional_id);
    MomentSet analytic = config.dist.moments(std::max(4, entry.moment_order));
    double truth = entry.value(analytic);

    EstimatorFamily family = config.family;
    if (family.kind == EstimatorFamily::Kind::TruncatedS && family.u == 0.0) {
        if (truth == 0.0) throw degenerate_error("cannot derive a truncation gate from T(F) = 0");
        family.u = 10.0 * std::abs(truth);
        family.c = 1.0 / (10.0 * truth);
    }

    long n_rep = config.replications;
    std::vector<double> estimates(static_cast<size_t>(n_rep), 0.0);
    std::vector<double> jack(config.baselines.jackknife ? static_cast<size_t>(n_rep) : 0, 0.0);
    std::vector<double> boot(config.baselines.bootstrap > 0 ? static_cast<size_t>(n_rep) : 0, 0.0);
    std::vector<long> evals(static_cast<size_t>(n_rep), 0);
    std::vector<long> jack_evals(jack.size(), 0);
    std::vector<long> boot_evals(boot.size(), 0);

    PluginEvaluator plugin = [&entry](const Eigen::VectorXd& x) {
        return entry.value(central_moments(x, entry.moment_order));
    };

    auto worker = [&](long lo, long hi) {
        for (long rep = lo; rep < hi; ++rep) {
            Rng rng(stream_seed(config.seed, static_cast<std::uint64_t>(rep)));
            Eigen::VectorXd x(config.n);
            for (int i = 0; i < config.n; ++i) x[i] = config.dist.draw(rng);

            double value = 0.0;
            MomentSet m = central_moments(x, entry.moment_order);
            switch (family.kind) {
                case EstimatorFamily::Kind::S:
                    value = assemble_estimate(entry.series_s(m), config.n, config.p);
                    break;
                case EstimatorFamily::Kind::T:
                    value = assemble_estimate(entry.series_t(m), config.n, config.p);
                    break;
                case EstimatorFamily::Kind::TruncatedS: {
                    double raw = entry.value(m);
                    if (std::abs(raw) < family.u)
                        value = assemble_estimate(entry.series_s(m), config.n, config.p);
                    else
                        value = family.c;
                    break;
                }
                case EstimatorFamily::Kind::Plus:
                    value = plus_estimate(entry.series_s(m), config.n, config.p).value;
                    break;
            }
            estimates[static_cast<size_t>(rep)] = value;
            evals[static_cast<size_t>(rep)] = 1;

            if (config.baselines.jackknife)
                jack[static_cast<size_t>(rep)] =
                    jackknife_baseline(x, plugin, &jack_evals[static_cast<size_t>(rep)]);
            if (config.baselines.bootstrap > 0)
                boot[static_cast<size_t>(rep)] = bootstrap_baseline(
                    x, plugin, config.baselines.bootstrap,
                    stream_seed(config.seed ^ 0x626f6f74ULL, static_cast<std::uint64_t>(rep)),
                    &boot_evals[static_cast<size_t>(rep)]);
        }
    };

    auto start = std::chrono::steady_clock::now();
    int threads = std::max(1, config.threads);
    if (threads == 1) {
        worker(0, n_rep);
    } else {
        std::vector<std::thread> pool;
        long chunk = (n_rep + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            long lo = t * chunk, hi = std::min<long>(n_rep, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (std::thread& t : pool) t.join();
    }
    auto stop = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.functional_id = config.functional_id;
    report.distribution = config.dist.label();
    report.family = family.name();
    report.n = config.n;
    report.p = config.p;
    report.replications = n_rep;
    report.seed = config.seed;
    report.estimator_mean = reduce_mean(estimates);
    report.se = standard_error(estimates, report.estimator_mean);
    report.truth = truth;
    report.absolute_bias = report.estimator_mean - truth;
    report.truth_nonzero = truth != 0.0;
    report.relative_bias = report.truth_nonzero ? report.absolute_bias / truth : 0.0;
    for (long e : evals) report.evaluations += e;
    report.seconds = std::chrono::duration<double>(stop - start).count();

    if (config.baselines.jackknife) {
        BaselineReport b;
        b.mean = reduce_mean(jack);
        b.se = standard_error(jack, b.mean);
        for (long e : jack_evals) b.evaluations += e;
        report.jackknife = b;
    }
    if (config.baselines.bootstrap > 0) {
        BaselineReport b;
        b.mean = reduce_mean(boot);
        b.se = standard_error(boot, b.mean);
        for (long e : boot_evals) b.evaluations += e;
        report.bootstrap = b;
    }
    return report;
}

double jackknife_baseline(const Eigen::VectorXd& x, const PluginEvaluator& t, long* evaluations) {
    Eigen::Index n = x.size();
    if (n < 2) throw std::invalid_argument("jackknife needs n >= 2");
    long count = 0;
    double full = t(x);
    ++count;
    Eigen::VectorXd loo(n - 1);
    double acc = 0.0;
    for (Eigen::Index drop = 0; drop < n; ++drop) {
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != drop) loo[k++] = x[i];
        acc += t(loo);
        ++count;
    }
    if (evaluations) *evaluations += count;
    double nn = static_cast<double>(n);
    return nn * full - (nn - 1.0) * (acc / nn);
}

double bootstrap_baseline(const Eigen::VectorXd& x, const PluginEvaluator& t, int b,
                          std::uint64_t seed, long* evaluations) {
    if (b < 1) throw std::invalid_argument("bootstrap needs B >= 1");
    Eigen::Index n = x.size();
    Rng rng(seed);
    double acc = 0.0;
    long count = 0;
    double full = t(x);
    ++count;
    Eigen::VectorXd star(n);
    for (int rep = 0; rep < b; ++rep) {
        for (Eigen::Index i = 0; i < n; ++i) {
            auto idx = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(n));
            star[i] = x[idx];
        }
        acc += t(star);
        ++count;
    }
    if (evaluations) *evaluations += count;
    return 2.0 * full - acc / static_cast<double>(b);
}

PlanResult plan_simulations(const std::string& functional_id, const Distribution& dist, double n,
                            int p, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    if (p < 1 || p > 3) throw std::invalid_argument("planner covers p in 1..3");
    CatalogEntry entry = catalog_entry(functional_id);
    if (!entry.influence_variance)
        throw unavailable_error("first-order variance for " + functional_id);
    MomentSet m = dist.moments(8);
    double vt = entry.influence_variance(m);
    CorrectionSeries s = entry.series_s(m);
    double sp = s.terms.at(static_cast<size_t>(p - 1));

    PlanResult out;
    if (sp == 0.0) {
        out.defined = false;
        out.note = "phi_" + std::to_string(p) + " not defined: S_" + std::to_string(p) +
                   "(F) = 0";
        return out;
    }
    out.defined = true;
    out.phi = 4.0 * vt / (sp * sp);
    out.required = std::ceil(std::pow(eps, -2.0) * std::pow(n, 2 * p - 1) * out.phi);
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) throw std::invalid_argument("bad numeric field: " + s);
    return v;
}

}  // namespace

namespace {

std::string csv_field(const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
    std::string out =
        "functional,distribution,family,n,p,N,seed,mean,truth,relative_bias,absolute_bias,se,"
        "evaluations\n";
    for (const ExperimentReport& r : reports) {
        out += csv_field(r.functional_id) + "," + csv_field(r.distribution) + "," + r.family +
               "," + std::to_string(r.n) + "," + std::to_string(r.p) + "," +
               std::to_string(r.replications) + "," + std::to_string(r.seed) + "," +
               format_double(r.estimator_mean) + "," + format_double(r.truth) + "," +
               (r.truth_nonzero ? format_double(r.relative_bias) : std::string("nan")) + "," +
               format_double(r.absolute_bias) + "," + format_double(r.se) + "," +
               std::to_string(r.evaluations) + "\n";
    }
    return out;
}

std::vector<ExperimentReport> reports_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::vector<ExperimentReport> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields = csv_split(line);
        if (fields.size() != 13) throw std::invalid_argument("bad CSV row: " + line);
        ExperimentReport r;
        r.functional_id = fields[0];
        r.distribution = fields[1];
        r.family = fields[2];
        r.n = std::stoi(fields[3]);
        r.p = std::stoi(fields[4]);
        r.replications = std::stol(fields[5]);
        r.seed = std::stoull(fields[6]);
        r.estimator_mean = parse_double(fields[7]);
        r.truth = parse_double(fields[8]);
        r.truth_nonzero = fields[9] != "nan";
        r.relative_bias = r.truth_nonzero ? parse_double(fields[9]) : 0.0;
        r.absolute_bias = parse_double(fields[10]);
        r.se = parse_double(fields[11]);
        r.evaluations = std::stol(fields[12]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string reports_to_markdown(const std::vector<ExperimentReport>& reports) {
    // rows are (distribution, seed) pairs, columns the (n, p) grid
    std::vector<std::pair<int, int>> cols;
    std::map<std::pair<std::string, std::uint64_t>, std::map<std::pair<int, int>, double>> cells;
    std::vector<std::pair<std::string, std::uint64_t>> row_order;
    for (const ExperimentReport& r : reports) {
        std::pair<int, int> col{r.n, r.p};
        if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
        std::pair<std::string, std::uint64_t> row{r.distribution, r.seed};
        if (!cells.count(row)) row_order.push_back(row);
        cells[row][col] = r.truth_nonzero ? r.relative_bias : r.absolute_bias;
    }
    std::sort(cols.begin(), cols.end());

    std::ostringstream os;
    os << "| distribution | run |";
    for (auto [n, p] : cols) os << " n=" << n << " p=" << p << " |";
    os << "\n|---|---|";
    for (size_t i = 0; i < cols.size(); ++i) os << "---|";
    os << "\n";
    std::map<std::string, int> run_index;
    for (const auto& row : row_order) {
        int run = ++run_index[row.first];
        os << "| " << row.first << " | " << run << " |";
        for (auto col : cols) {
            auto it = cells[row].find(col);
            if (it == cells[row].end())
                os << " |";
            else {
                char buf[32];
                std::snprintf(buf, sizeof(buf), " %.4f |", it->second);
                os << buf;
            }
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace lowbias
