#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bqfl/anneal.hpp"
#include "bqfl/attacks.hpp"
#include "bqfl/config.hpp"
#include "bqfl/distance.hpp"
#include "bqfl/harness.hpp"
#include "bqfl/qubo.hpp"
#include "bqfl/report.hpp"
#include "bqfl/rng.hpp"

namespace fs = std::filesystem;
using namespace bqfl;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::string> attack;
    std::optional<std::string> aggregator;
    std::optional<std::size_t> n;
    std::optional<std::size_t> f;
    std::optional<std::size_t> rounds;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> reads;
    std::optional<double> tau_e;
    std::optional<double> tau_c;
    std::optional<double> alpha;
    std::optional<std::size_t> workers;
    std::vector<std::string> sets;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "Experiment config file");
    app->add_option("--attack", o.attack, "Attack name (" + attack_names("|") + ")");
    app->add_option("--aggregator", o.aggregator, "classical|qubo|cascade|multisignal");
    app->add_option("--n", o.n, "Number of clients");
    app->add_option("--f", o.f, "Number of Byzantine clients");
    app->add_option("--rounds", o.rounds, "FL rounds");
    app->add_option("--seed", o.seed, "Experiment seed");
    app->add_option("--out", o.out, "Output path");
    app->add_option("--reads", o.reads, "Annealing reads");
    app->add_option("--tau-e", o.tau_e, "Euclidean routing threshold");
    app->add_option("--tau-c", o.tau_c, "Cosine routing threshold");
    app->add_option("--alpha", o.alpha, "Dual blend weight");
    app->add_option("--workers", o.workers, "Annealing worker threads (0 = all cores)");
    app->add_option("--set", o.sets, "Override any config field: section.key=value");
}

// Defaults, then the config file, then flags.
ConfigDocument load_document(const CommonOptions& o) {
    ConfigDocument doc = o.config_path.empty() ? ConfigDocument{} : ConfigDocument::load(o.config_path);
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::runtime_error("--set expects section.key=value, got '" + s + "'");
        }
        doc.set(s.substr(0, eq), s.substr(eq + 1));
    }
    return doc;
}

ExperimentConfig resolve(const CommonOptions& o, const ConfigDocument& doc) {
    ExperimentConfig c = apply_config(doc);
    if (o.attack) {
        c.attack.kind = parse_attack(*o.attack);
    }
    if (o.aggregator) {
        c.aggregator = parse_aggregator(*o.aggregator);
    }
    if (o.n) {
        c.n = *o.n;
    }
    if (o.f) {
        c.f = *o.f;
    }
    if (o.rounds) {
        c.rounds = *o.rounds;
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.reads) {
        c.anneal.reads = *o.reads;
    }
    if (o.tau_e) {
        c.routing.tau_E = *o.tau_e;
    }
    if (o.tau_c) {
        c.routing.tau_C = *o.tau_c;
    }
    if (o.alpha) {
        c.blend.alpha = *o.alpha;
    }
    if (o.workers) {
        c.anneal.workers = *o.workers;
    }
    return c;
}

std::string output_dir() {
    const char* env = std::getenv("BQFL_OUTPUT_DIR");
    return env && *env ? env : "results";
}

// CSV path for a run; the JSON summary sits next to it.
std::string csv_path(const CommonOptions& o, const ExperimentConfig& c) {
    std::string path;
    if (o.out) {
        path = *o.out;
    } else if (!c.output_path.empty()) {
        path = c.output_path;
    } else {
        path = (fs::path(output_dir()) / (std::string(to_string(c.attack.kind)) + "_" +
                                          std::string(to_string(c.aggregator)) + "_seed" + std::to_string(c.seed) +
                                          ".csv"))
                   .string();
    }
    if (fs::path(path).extension() != ".csv") {
        path += ".csv";
    }
    return path;
}

std::string with_extension(const std::string& path, const std::string& ext) {
    return fs::path(path).replace_extension(ext).string();
}

void print_metrics_header() {
    std::printf("%-16s %-12s %9s %9s %9s %9s\n", "attack", "aggregator", "accuracy", "f1", "reject", "retain");
}

void print_metrics_row(const std::string& attack, const std::string& aggregator, const RoundMetrics& m) {
    std::printf("%-16s %-12s %9.4f %9.4f %9.4f %9.4f\n", attack.c_str(), aggregator.c_str(), m.detection_accuracy,
                m.f1, m.byzantine_rejection_rate, m.honest_retention_rate);
}

int cmd_run(const CommonOptions& o) {
    const auto doc = load_document(o);
    ExperimentConfig c = resolve(o, doc);
    const std::string csv = csv_path(o, c);
    c.output_path = csv;
    const auto report = run_experiment(c);

    std::ostringstream rows;
    write_round_csv(rows, report);
    write_file_atomic(csv, rows.str());
    write_file_atomic(with_extension(csv, ".json"), summary_json(report).dump(2) + "\n");

    print_metrics_header();
    print_metrics_row(std::string(to_string(c.attack.kind)), std::string(to_string(c.aggregator)), report.aggregate);
    std::printf("wrote %s\n", csv.c_str());
    return 0;
}

struct Cell {
    AttackKind attack;
    Aggregator aggregator;
    std::optional<RoundMetrics> metrics;
    std::string error;
};

std::vector<std::uint64_t> seed_list(const ConfigDocument& doc, const ExperimentConfig& base,
                                     std::optional<std::size_t> seed_count) {
    std::vector<std::uint64_t> seeds;
    if (seed_count) {
        for (std::size_t s = 0; s < *seed_count; ++s) {
            seeds.push_back(base.seed + s);
        }
    } else if (const auto v = doc.get_list("sweep.seeds")) {
        for (const auto& s : *v) {
            seeds.push_back(std::stoull(s));
        }
    }
    if (seeds.empty()) {
        seeds.push_back(base.seed);
    }
    return seeds;
}

// Each seed is a full experiment; the cell reports the mean of their aggregates.
void run_cell(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds, Cell& cell) {
    try {
        std::vector<RoundMetrics> per_seed;
        for (const auto seed : seeds) {
            ExperimentConfig c = base;
            c.attack.kind = cell.attack;
            c.aggregator = cell.aggregator;
            c.seed = seed;
            per_seed.push_back(run_experiment(c).aggregate);
        }
        cell.metrics = aggregate_metrics(per_seed);
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
}

void run_cells(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds, std::vector<Cell>& cells,
               std::size_t jobs) {
    jobs = std::max<std::size_t>(1, std::min(jobs, cells.size()));
    if (jobs == 1) {
        for (auto& cell : cells) {
            run_cell(base, seeds, cell);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < cells.size(); i += jobs) {
                run_cell(base, seeds, cells[i]);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

std::string long_csv(const std::vector<Cell>& cells, std::size_t seeds, std::size_t rounds) {
    std::ostringstream out;
    out << "attack,aggregator,seeds,rounds,detection_accuracy,f1,byz_rejection,honest_retention,status,error\n";
    for (const auto& cell : cells) {
        out << to_string(cell.attack) << ',' << to_string(cell.aggregator) << ',' << seeds << ',' << rounds << ',';
        if (cell.metrics) {
            const auto& m = *cell.metrics;
            out << format_real(m.detection_accuracy) << ',' << format_real(m.f1) << ','
                << format_real(m.byzantine_rejection_rate) << ',' << format_real(m.honest_retention_rate)
                << ",ok,\n";
        } else {
            std::string msg = cell.error;
            for (auto& ch : msg) {
                if (ch == ',' || ch == '\n') {
                    ch = ';';
                }
            }
            out << ",,,,failed," << msg << '\n';
        }
    }
    return out.str();
}

// Attacks as rows, one accuracy/F1 column pair per aggregator.
std::string table_csv(const std::vector<Cell>& cells, const std::vector<AttackKind>& attacks,
                      const std::vector<Aggregator>& aggregators) {
    std::ostringstream out;
    out << "attack";
    for (const auto agg : aggregators) {
        out << ',' << to_string(agg) << "_accuracy," << to_string(agg) << "_f1";
    }
    out << '\n';
    for (const auto attack : attacks) {
        out << to_string(attack);
        for (const auto agg : aggregators) {
            for (const auto& cell : cells) {
                if (cell.attack == attack && cell.aggregator == agg) {
                    if (cell.metrics) {
                        out << ',' << format_real(cell.metrics->detection_accuracy) << ','
                            << format_real(cell.metrics->f1);
                    } else {
                        out << ",,";
                    }
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

struct GridOptions {
    std::vector<std::string> attacks;
    std::vector<std::string> aggregators;
    std::optional<std::size_t> seeds;
    std::size_t jobs = 1;
};

int run_grid(const CommonOptions& o, const GridOptions& g, bool compare) {
    const auto doc = load_document(o);
    const ExperimentConfig base = resolve(o, doc);

    std::vector<std::string> attack_names_list = g.attacks;
    if (attack_names_list.empty()) {
        if (compare || o.attack) {
            attack_names_list.push_back(std::string(to_string(base.attack.kind)));
        } else if (const auto v = doc.get_list("sweep.attacks")) {
            attack_names_list = *v;
        }
    }
    std::vector<std::string> agg_names = g.aggregators;
    if (agg_names.empty()) {
        if (const auto v = doc.get_list("sweep.aggregators")) {
            agg_names = *v;
        } else if (compare) {
            agg_names = {"classical", "qubo", "cascade", "multisignal"};
        } else if (o.aggregator) {
            agg_names.push_back(*o.aggregator);
        }
    }
    if (attack_names_list.empty() || agg_names.empty()) {
        std::fprintf(stderr, "error: empty grid (need at least one attack and one aggregator)\n");
        return 2;
    }
    std::vector<AttackKind> attacks;
    for (const auto& a : attack_names_list) {
        attacks.push_back(parse_attack(a));
    }
    std::vector<Aggregator> aggregators;
    for (const auto& a : agg_names) {
        aggregators.push_back(parse_aggregator(a));
    }
    const auto seeds = seed_list(doc, base, g.seeds);

    std::vector<Cell> cells;
    for (const auto attack : attacks) {
        for (const auto agg : aggregators) {
            cells.push_back(Cell{attack, agg, std::nullopt, {}});
        }
    }
    run_cells(base, seeds, cells, g.jobs);

    std::string path = o.out ? *o.out : (fs::path(output_dir()) / (compare ? "compare.csv" : "sweep.csv")).string();
    if (fs::path(path).extension() != ".csv") {
        path += ".csv";
    }
    write_file_atomic(path, long_csv(cells, seeds.size(), base.rounds));
    const std::string table = with_extension(path, "").append("_table.csv");
    write_file_atomic(table, table_csv(cells, attacks, aggregators));

    print_metrics_header();
    std::size_t failures = 0;
    for (const auto& cell : cells) {
        if (cell.metrics) {
            print_metrics_row(std::string(to_string(cell.attack)), std::string(to_string(cell.aggregator)),
                              *cell.metrics);
        } else {
            ++failures;
            std::printf("%-16s %-12s failed: %s\n", std::string(to_string(cell.attack)).c_str(),
                        std::string(to_string(cell.aggregator)).c_str(), cell.error.c_str());
        }
    }
    std::printf("%zu cells (%zu failed); wrote %s and %s\n", cells.size(), failures, path.c_str(), table.c_str());
    return failures == cells.size() ? 1 : 0;
}

struct DumpOptions {
    std::size_t round = 0;
    std::string kind = "selection";
    std::string metric = "cosine";
};

int cmd_dump(const CommonOptions& o, const DumpOptions& d) {
    const auto doc = load_document(o);
    ExperimentConfig c = resolve(o, doc);
    if (d.kind != "selection" && d.kind != "suspicion") {
        throw std::runtime_error("--kind must be selection or suspicion");
    }
    c.rounds = d.round + 1;
    std::optional<QuboModel> model;
    run_experiment(c, [&](std::size_t round, const RoundInputs& inputs, const SelectionResult&) {
        if (round != d.round) {
            return;
        }
        const auto& projected = inputs.projected.values;
        if (d.kind == "suspicion") {
            model = build_suspicion_qubo(dual_distance(projected, c.blend), c.selection_size(), c.suspicion).model;
        } else if (d.metric == "cosine") {
            model = build_selection_qubo(cosine_matrix(projected, c.blend.epsilon), c.selection_size());
        } else if (d.metric == "dual") {
            model = build_selection_qubo(dual_distance(projected, c.blend), c.selection_size());
        } else {
            throw std::runtime_error("--metric must be cosine or dual");
        }
    });
    if (o.out) {
        std::ostringstream text;
        write_qubo(text, *model);
        write_file_atomic(*o.out, text.str());
    } else {
        write_qubo(std::cout, *model);
    }
    return 0;
}

struct VerifyOptions {
    std::size_t n = 12;
    std::size_t instances = 100;
    std::size_t reads = 1000;
    std::size_t sweeps = 1000;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
};

DistanceMatrix random_cosine_matrix(std::size_t n, RandomStream& rng) {
    VectorSet points(n, 8);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : points.row(i)) {
            v = rng.normal();
        }
    }
    return cosine_matrix(points);
}

int cmd_verify(const VerifyOptions& v) {
    if (v.n < 2 || v.n > kMaxExactVariables) {
        std::fprintf(stderr, "error: --n must lie in [2, %zu] (exact solve guard)\n", kMaxExactVariables);
        return 2;
    }
    std::size_t sound = 0, exact = 0, feasible = 0, cut_ok = 0;
    for (std::size_t k = 0; k < v.instances; ++k) {
        RandomStream rng(derive_seed(v.seed, {k}));
        const auto D = random_cosine_matrix(v.n, rng);
        const std::size_t m = 1 + rng.index(v.n - 1);
        const auto q = build_selection_qubo(D, m);
        const auto best = brute_force_solve(q);
        AnnealConfig ac;
        ac.reads = v.reads;
        ac.sweeps_per_read = v.sweeps;
        ac.seed = derive_seed(v.seed, {k, 1});
        ac.workers = v.workers;
        const auto sa = simulated_anneal(q, ac);
        const double tol = 1e-9 * std::max(1.0, std::abs(best.energy));
        sound += sa.best_energy >= best.energy - tol;
        exact += std::abs(sa.best_energy - best.energy) <= tol;
        std::size_t ones = 0;
        for (const auto x : best.assignment) {
            ones += x;
        }
        feasible += ones == m;

        // Cut identity on every feasible assignment.
        bool ok = true;
        for (std::uint32_t mask = 0; mask < (1U << v.n) && ok; ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) {
                continue;
            }
            Assignment x(v.n);
            double cut = 0.0;
            for (std::size_t i = 0; i < v.n; ++i) {
                x[i] = (mask >> i) & 1U;
            }
            for (std::size_t i = 0; i < v.n; ++i) {
                for (std::size_t j = 0; j < v.n; ++j) {
                    if (x[i] && !x[j]) {
                        cut += D(i, j);
                    }
                }
            }
            ok = std::abs(selection_objective(D, x) - cut) <= 1e-9;
        }
        cut_ok += ok;
    }
    const std::size_t need = (v.instances * 95 + 99) / 100;
    const bool pass = sound == v.instances && exact >= need && feasible == v.instances && cut_ok == v.instances;
    std::printf("SA soundness: %zu/%zu instances >= exact min, %zu exact (need %zu)\n", sound, v.instances, exact,
                need);
    std::printf("exact optima feasible: %zu/%zu\n", feasible, v.instances);
    std::printf("cut identity: %zu/%zu instances\n", cut_ok, v.instances);
    std::printf("%s\n", pass ? "verify: PASS" : "verify: FAIL");
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-robust FL aggregation experiments"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, compare_opts, dump_opts;
    auto* run = app.add_subcommand("run", "Run one experiment and write its CSV and JSON summary");
    add_common(run, run_opts);

    GridOptions sweep_grid, compare_grid;
    auto* sweep = app.add_subcommand("sweep", "Run every attack x aggregator cell of a grid");
    add_common(sweep, sweep_opts);
    sweep->add_option("--attacks", sweep_grid.attacks, "Attack names")->delimiter(',');
    sweep->add_option("--aggregators", sweep_grid.aggregators, "Aggregator names")->delimiter(',');
    sweep->add_option("--seeds", sweep_grid.seeds, "Number of consecutive seeds per cell");
    sweep->add_option("--jobs", sweep_grid.jobs, "Cells run concurrently");

    auto* compare = app.add_subcommand("compare", "Run one attack under several aggregators");
    add_common(compare, compare_opts);
    compare->add_option("--aggregators", compare_grid.aggregators, "Aggregator names")->delimiter(',');
    compare->add_option("--seeds", compare_grid.seeds, "Number of consecutive seeds");
    compare->add_option("--jobs", compare_grid.jobs, "Cells run concurrently");

    DumpOptions dump;
    auto* dump_cmd = app.add_subcommand("dump-qubo", "Write the QUBO of one experiment round as text");
    add_common(dump_cmd, dump_opts);
    dump_cmd->add_option("--round", dump.round, "0-based round index");
    dump_cmd->add_option("--kind", dump.kind, "selection|suspicion");
    dump_cmd->add_option("--metric", dump.metric, "cosine|dual (selection QUBO only)");

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check the annealer against exact solves on random QUBOs");
    verify_cmd->add_option("--n", verify.n, "Variables per instance (at most 24)");
    verify_cmd->add_option("--instances", verify.instances, "Number of instances");
    verify_cmd->add_option("--reads", verify.reads, "Annealing reads");
    verify_cmd->add_option("--sweeps", verify.sweeps, "Sweeps per read");
    verify_cmd->add_option("--seed", verify.seed, "Instance seed");
    verify_cmd->add_option("--workers", verify.workers, "Annealing worker threads");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) {
            return cmd_run(run_opts);
        }
        if (sweep->parsed()) {
            return run_grid(sweep_opts, sweep_grid, false);
        }
        if (compare->parsed()) {
            return run_grid(compare_opts, compare_grid, true);
        }
        if (dump_cmd->parsed()) {
            return cmd_dump(dump_opts, dump);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(verify);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
