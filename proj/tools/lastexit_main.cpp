// Command-line driver. Subcommands:
//   constants         normalizing constants for (model, boundary, eps), JSON
//   study             simulate last-exit times, CSV per replicate or JSON summary
//   verify            numerical checks of the expansion steps, JSON report
//   certify           model/boundary assumption certificates, JSON report
//   gamma-ladder      critical level vs its slow asymptotics over an eps ladder, CSV
//   check-lemma-r     residuals of the shift expansion, CSV
//   verify-lemma-prop brute-force vs closed-form discrete-sum law, CSV
//   stats             refit a study CSV against its stored limit law, JSON
// Exit codes: 0 ok, 2 bad config/arguments, 3 unsupported model/boundary,
// 4 verification failure, 5 resource limit.
#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lastexit/config.hpp"
#include "lastexit/errors.hpp"
#include "lastexit/io.hpp"
#include "lastexit/kernels.hpp"
#include "lastexit/normalize.hpp"
#include "lastexit/slepian.hpp"
#include "lastexit/stats.hpp"
#include "lastexit/study.hpp"
#include "lastexit/version.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string config_path;
    double eps = 0.0;            // 0 = not given
    std::int64_t seed = -1;      // -1 = not given
    std::int64_t replicates = -1;
    std::string out;
    std::string format;
};

void add_config_flags(CLI::App* cmd, CommonFlags& c) {
    cmd->add_option("--config", c.config_path, "configuration file");
    cmd->add_option("--eps", c.eps, "drift parameter, overrides the config");
    cmd->add_option("--out", c.out, "output file (default: stdout)");
}

void add_run_flags(CLI::App* cmd, CommonFlags& c) {
    cmd->add_option("--seed", c.seed, "RNG seed, overrides the config");
    cmd->add_option("--replicates", c.replicates, "replicate count, overrides the config");
}

lastexit::ExperimentConfig resolve(const CommonFlags& c) {
    lastexit::ExperimentConfig cfg = c.config_path.empty()
                                         ? lastexit::ExperimentConfig{}
                                         : lastexit::load_config_file(c.config_path);
    if (!cfg.raw.is_object()) cfg.raw = json::object();
    if (c.eps != 0.0) {
        if (!(c.eps > 0.0 && c.eps < 1.0)) throw lastexit::ConfigError("--eps must lie in (0, 1)");
        cfg.eps_ladder = {c.eps};
        cfg.raw.erase("eps_ladder");
        cfg.raw["eps"] = c.eps;
    }
    if (c.seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(c.seed);
        cfg.raw["seed"] = cfg.seed;
    } else if (c.seed != -1) {
        throw lastexit::ConfigError("--seed must be nonnegative");
    }
    if (c.replicates >= 0) {
        cfg.n_replicates = static_cast<std::size_t>(c.replicates);
        cfg.raw["n_replicates"] = cfg.n_replicates;
    } else if (c.replicates != -1) {
        throw lastexit::ConfigError("--replicates must be nonnegative");
    }
    if (!c.out.empty()) cfg.out = c.out;
    if (!c.format.empty()) cfg.format = c.format;
    return cfg;
}

bool eps_specified(const lastexit::ExperimentConfig& cfg) {
    return cfg.raw.contains("eps") || cfg.raw.contains("eps_ladder");
}

std::vector<double> ladder_or(const lastexit::ExperimentConfig& cfg,
                              std::vector<double> fallback) {
    return eps_specified(cfg) ? cfg.eps_ladder : std::move(fallback);
}

void emit(const lastexit::ExperimentConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        lastexit::write_text_file(cfg.out, text);
    }
}

void emit_json(const lastexit::ExperimentConfig& cfg, const json& doc) {
    emit(cfg, doc.dump(2) + "\n");
}

json constants_json(const lastexit::ExperimentConfig& cfg, double eps) {
    lastexit::NormalizingConstants nc = lastexit::constants(cfg.model, cfg.boundary, eps);
    return json{{"eps", nc.eps},
                {"gamma", nc.gamma},
                {"tau0", nc.tau0},
                {"A", nc.A},
                {"B", nc.B},
                {"c", nc.c},
                {"pickands_constant", nc.pickands_constant},
                {"convention", "o1-dropped"}};
}

void run_constants(const CommonFlags& flags) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    if (cfg.format == "csv") {
        std::vector<std::vector<std::string>> rows;
        for (double eps : cfg.eps_ladder) {
            lastexit::NormalizingConstants nc = lastexit::constants(cfg.model, cfg.boundary, eps);
            rows.push_back({lastexit::fmt_double(nc.eps), lastexit::fmt_double(nc.gamma),
                            lastexit::fmt_double(nc.tau0), lastexit::fmt_double(nc.A),
                            lastexit::fmt_double(nc.B), lastexit::fmt_double(nc.c),
                            lastexit::fmt_double(nc.pickands_constant)});
        }
        json hdr = cfg.raw;
        hdr["convention"] = "o1-dropped";
        emit(cfg, lastexit::csv_document(
                      hdr, {"eps", "gamma", "tau0", "A", "B", "c", "pickands_constant"}, rows));
        return;
    }
    if (cfg.eps_ladder.size() == 1) {
        emit_json(cfg, constants_json(cfg, cfg.eps_ladder[0]));
    } else {
        json arr = json::array();
        for (double eps : cfg.eps_ladder) arr.push_back(constants_json(cfg, eps));
        emit_json(cfg, arr);
    }
}

void run_study_cmd(const CommonFlags& flags) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    if (cfg.eps_ladder.size() != 1) {
        throw lastexit::ConfigError("study runs a single eps; give --eps or one-entry 'eps'");
    }
    if (cfg.n_replicates == 0) {
        throw lastexit::ConfigError("study requires n_replicates (config key or --replicates)");
    }
    if (cfg.n_replicates < 100) {
        throw lastexit::ConfigError("n_replicates must be at least 100");
    }
    lastexit::ExitTimeStudy study = lastexit::run_study(
        cfg.model, cfg.boundary, cfg.eps_ladder[0], cfg.n_replicates, cfg.grid, cfg.seed);
    if (cfg.format == "csv") {
        emit(cfg, lastexit::study_csv(study, cfg.raw));
    } else {
        emit_json(cfg, lastexit::with_header(cfg.raw, lastexit::study_summary(study)));
    }
}

std::vector<std::vector<std::string>> gamma_ladder_rows(const lastexit::ExperimentConfig& cfg,
                                                        const std::vector<double>& ladder,
                                                        json* json_rows) {
    std::vector<std::vector<std::string>> rows;
    for (double eps : ladder) {
        double g = lastexit::solve_gamma(cfg.boundary, eps);
        lastexit::GammaAsymptotic plain = lastexit::gamma_asymptotic(cfg.boundary, eps, false);
        lastexit::GammaAsymptotic refined = lastexit::gamma_asymptotic(cfg.boundary, eps, true);
        double gap_plain = std::fabs(g - plain.value);
        double refined_value = refined.order_only ? std::nan("") : refined.value;
        double gap_refined = refined.order_only ? std::nan("") : std::fabs(g - refined.value);
        rows.push_back({lastexit::fmt_double(eps), lastexit::fmt_double(g),
                        lastexit::fmt_double(plain.value), lastexit::fmt_double(refined_value),
                        lastexit::fmt_double(gap_plain), lastexit::fmt_double(gap_refined)});
        if (json_rows) {
            json_rows->push_back({{"eps", eps},
                                  {"gamma", g},
                                  {"gamma_asym", plain.value},
                                  {"gap_asym", gap_plain},
                                  {"order_only", refined.order_only}});
            if (!refined.order_only) {
                json_rows->back()["gamma_refined"] = refined.value;
                json_rows->back()["gap_refined"] = gap_refined;
            }
        }
    }
    return rows;
}

const std::vector<std::string> kGammaLadderColumns = {"eps",           "gamma",
                                                      "gamma_asym",    "gamma_refined",
                                                      "gap_asym",      "gap_refined"};

void run_gamma_ladder(const CommonFlags& flags) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    std::vector<double> ladder = ladder_or(cfg, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8});
    auto rows = gamma_ladder_rows(cfg, ladder, nullptr);
    emit(cfg, lastexit::csv_document(cfg.raw, kGammaLadderColumns, rows));
}

void run_check_lemma_r(const CommonFlags& flags, const std::vector<double>& r_flags) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    std::vector<double> ladder = ladder_or(cfg, {1e-3, 1e-5, 1e-7, 1e-9});
    std::vector<double> r_values = r_flags.empty() ? std::vector<double>{-1.0, 0.0, 1.0} : r_flags;
    std::vector<lastexit::LemmaRPoint> points =
        lastexit::check_lemma_R(cfg.boundary, cfg.model.alpha, ladder, r_values);
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : points) {
        rows.push_back({lastexit::fmt_double(p.eps), lastexit::fmt_double(p.r),
                        lastexit::fmt_double(p.residual), p.regime_ok ? "1" : "0"});
    }
    emit(cfg, lastexit::csv_document(cfg.raw, {"eps", "r", "residual", "regime_ok(0/1)"}, rows));
}

json lemma_prop_json(const lastexit::LemmaPropResult& r) {
    return json{{"brute_sum", r.brute_sum},
                {"closed_form", r.closed_form},
                {"ratio", r.ratio},
                {"gamma", r.gamma},
                {"theta", r.theta},
                {"a", r.a},
                {"fprime_ratio_lo", r.fprime_ratio_lo},
                {"fprime_ratio_hi", r.fprime_ratio_hi},
                {"level_dev", r.level_dev},
                {"a_over_theta", r.a_over_theta},
                {"c_product", r.c_product},
                {"a_product", r.a_product}};
}

void run_verify_lemma_prop(const CommonFlags& flags, double spacing, double b_off, double c_off,
                           double theta_flag) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    std::vector<double> ladder = ladder_or(cfg, {1e-3, 1e-5, 1e-8});
    std::vector<std::vector<std::string>> rows;
    for (double eps : ladder) {
        double theta = theta_flag > 0.0
                           ? theta_flag
                           : cfg.boundary.finv(lastexit::solve_gamma(cfg.boundary, eps) / eps);
        double a = spacing > 0.0 ? spacing
                                 : lastexit::lemma_prop_default_spacing(cfg.boundary, eps, theta);
        lastexit::LemmaPropResult r = lastexit::verify_lemma_prop(
            cfg.boundary, cfg.model.alpha, eps, a, b_off, c_off, theta);
        rows.push_back({lastexit::fmt_double(eps), lastexit::fmt_double(r.theta),
                        lastexit::fmt_double(r.a), lastexit::fmt_double(b_off),
                        lastexit::fmt_double(c_off), lastexit::fmt_double(r.brute_sum),
                        lastexit::fmt_double(r.closed_form), lastexit::fmt_double(r.ratio),
                        lastexit::fmt_double(r.gamma)});
    }
    emit(cfg, lastexit::csv_document(cfg.raw,
                                     {"eps", "theta", "a", "b_off", "c_off", "brute_sum",
                                      "closed_form", "ratio", "gamma"},
                                     rows));
}

void run_verify(const CommonFlags& flags, const std::string& lemma, double delta2) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    json report;
    report["version"] = lastexit::kVersion;
    report["config"] = cfg.raw;
    std::string failure;

    bool all = lemma == "all";
    if (all || lemma == "gamma") {
        json rows = json::array();
        gamma_ladder_rows(cfg, ladder_or(cfg, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}), &rows);
        report["gamma_ladder"] = rows;
    }
    if (all || lemma == "r") {
        json rows = json::array();
        for (const auto& p : lastexit::check_lemma_R(cfg.boundary, cfg.model.alpha,
                                                     ladder_or(cfg, {1e-3, 1e-5, 1e-7, 1e-9}),
                                                     {-1.0, 0.0, 1.0})) {
            rows.push_back({{"eps", p.eps},
                            {"r", p.r},
                            {"residual", p.residual},
                            {"regime_ok", p.regime_ok}});
        }
        report["shift_expansion"] = rows;
    }
    if (all || lemma == "prop") {
        json rows = json::array();
        for (double eps : ladder_or(cfg, {1e-3, 1e-5, 1e-8})) {
            double theta = cfg.boundary.finv(lastexit::solve_gamma(cfg.boundary, eps) / eps);
            double a = lastexit::lemma_prop_default_spacing(cfg.boundary, eps, theta);
            lastexit::LemmaPropResult r =
                lastexit::verify_lemma_prop(cfg.boundary, cfg.model.alpha, eps, a, 0.0, 0.0, theta);
            json row = lemma_prop_json(r);
            row["eps"] = eps;
            rows.push_back(row);
        }
        report["discrete_sum_law"] = rows;
    }
    if (all || lemma == "pp-tail") {
        json rows = json::array();
        for (double x : {3.0, 3.5, 4.0}) {
            lastexit::PpTailResult r = lastexit::pp_tail(cfg.model, x, 10.0);
            rows.push_back({{"x", x},
                            {"t", 10.0},
                            {"value", r.value},
                            {"value_ok", r.value_ok},
                            {"regime_ok", r.regime_ok}});
        }
        report["short_interval_tail"] = rows;
    }
    if (all || lemma == "slepian") {
        std::size_t reps = cfg.n_replicates > 0 ? cfg.n_replicates : 20000;
        lastexit::SlepianReport r =
            lastexit::slepian_check(cfg.model, {0.0, 1.0}, {5.0, 6.0}, 2.0, delta2, 0.01, reps,
                                    cfg.seed);
        report["ordering_check"] = {{"delta2", r.delta2},
                                    {"level", r.level},
                                    {"n_replicates", r.n_replicates},
                                    {"p_original", r.p_original},
                                    {"p_inflated", r.p_inflated},
                                    {"se_combined", r.se_combined},
                                    {"max_cross_corr", r.max_cross_corr},
                                    {"hypothesis_ok", r.hypothesis_ok},
                                    {"passed", r.passed}};
        if (!r.hypothesis_ok) failure = "ordering check: delta^2 below the cross-correlation bound";
        if (!r.passed) failure = "ordering check: exceedance probabilities out of order";
    }
    emit_json(cfg, report);
    if (!failure.empty()) throw lastexit::VerificationError(failure);
}

void run_certify(const CommonFlags& flags) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    json report;
    report["version"] = lastexit::kVersion;
    report["config"] = cfg.raw;
    std::string failure;

    lastexit::PickandsReport pick =
        lastexit::certify_pickands(cfg.model, lastexit::default_pickands_ladder());
    report["local_expansion"] = {{"v_hat", pick.v_hat},
                                 {"Q_hat", pick.Q_hat},
                                 {"alpha_hat", pick.alpha_hat},
                                 {"max_rel_dev", pick.max_rel_dev},
                                 {"tolerance", pick.tolerance},
                                 {"passed", pick.passed}};

    lastexit::BermanReport berman =
        lastexit::certify_berman(cfg.model, lastexit::default_berman_ladder());
    json witness = json::array();
    for (const auto& [t, w] : berman.witness) witness.push_back({{"t", t}, {"weighted_corr", w}});
    report["long_range_decay"] = {{"passed", berman.passed},
                                  {"sup_tail_corr", berman.sup_tail_corr},
                                  {"witness", witness}};
    if (!berman.passed) failure = "long-range decay check failed";

    lastexit::LambdaEstimate lam =
        lastexit::estimate_lambda(cfg.boundary, lastexit::default_lambda_grid());
    double eps0 = cfg.eps_ladder.front();
    lastexit::RegularityReport reg =
        lastexit::probe_regularity(cfg.boundary, eps0, lastexit::solve_gamma(cfg.boundary, eps0));
    report["boundary"] = {{"lambda_declared", cfg.boundary.lambda},
                          {"lambda_hat", lam.lambda_hat},
                          {"band_lo", lam.band_lo},
                          {"band_hi", lam.band_hi},
                          {"band_ok", lam.band_ok},
                          {"eps", eps0},
                          {"reg1_max_dev", reg.reg1_max_dev},
                          {"reg2_max_ratio", reg.reg2_max_ratio}};
    if (!lam.band_ok) failure = "boundary growth-rate band is unbounded";

    emit_json(cfg, report);
    if (!failure.empty()) throw lastexit::VerificationError(failure);
}

void run_stats(const CommonFlags& flags, const std::string& in_path) {
    lastexit::ExperimentConfig cfg = resolve(flags);
    std::ifstream f(in_path);
    if (!f) throw lastexit::ConfigError("cannot open study file: " + in_path);

    json stored;
    std::vector<double> normalized;
    std::size_t censored = 0, no_exit = 0, rows = 0;
    std::string line;
    bool saw_header = false;
    while (std::getline(f, line)) {
        if (line.rfind("# config: ", 0) == 0) {
            stored = json::parse(line.substr(10), nullptr, false);
            if (stored.is_discarded()) {
                throw lastexit::ConfigError("study file has an unreadable config header");
            }
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line.rfind("replicate,raw_T,normalized_T,censored", 0) != 0) {
                throw lastexit::ConfigError("not a study CSV (unexpected header row)");
            }
            saw_header = true;
            continue;
        }
        std::uintmax_t idx = 0;
        double raw_t = 0.0, norm_t = 0.0;
        int cens = 0;
        if (std::sscanf(line.c_str(), "%ju,%lf,%lf,%d", &idx, &raw_t, &norm_t, &cens) != 4) {
            throw lastexit::ConfigError("malformed study row: " + line);
        }
        ++rows;
        if (cens != 0) {
            ++censored;
        } else if (!std::isfinite(raw_t)) {
            ++no_exit;
        } else {
            normalized.push_back(norm_t);
        }
    }
    if (!saw_header || rows == 0) throw lastexit::ConfigError("study file contains no data rows");
    if (!stored.contains("constants") || !stored["constants"].contains("c")) {
        throw lastexit::ConfigError("study file header lacks the stored limit-law constants");
    }

    lastexit::GumbelLaw law{stored["constants"]["c"].get<double>()};
    json out;
    out["version"] = lastexit::kVersion;
    out["config"] = stored;
    out["n_rows"] = rows;
    out["n_exits"] = normalized.size();
    out["censored_count"] = censored;
    out["no_exit_count"] = no_exit;
    out["censored_fraction"] = static_cast<double>(censored) / static_cast<double>(rows);
    if (!normalized.empty()) {
        out["ks_distance"] = lastexit::ks_distance(normalized, law);
        std::vector<double> sorted = normalized;
        std::sort(sorted.begin(), sorted.end());
        json table = json::array();
        for (int k = 1; k <= 9; ++k) {
            double p = 0.1 * k;
            table.push_back({{"level", p},
                             {"empirical", lastexit::empirical_quantile(sorted, p)},
                             {"theoretical", lastexit::gumbel_quantile(law, p)}});
        }
        out["quantile_table"] = table;
    } else {
        out["ks_distance"] = nullptr;
        out["quantile_table"] = json::array();
    }
    emit_json(cfg, out);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        lastexit::apply_thread_config();

        CLI::App app{"Gumbel limit toolkit for last exit times of Gaussian processes"};
        app.require_subcommand(1);

        CommonFlags c_const, c_study, c_verify, c_certify, c_gamma, c_lemr, c_lemp, c_stats;

        CLI::App* sc = app.add_subcommand("constants", "normalizing constants (JSON)");
        add_config_flags(sc, c_const);
        sc->add_option("--format", c_const.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sc->callback([&] { run_constants(c_const); });

        CLI::App* st = app.add_subcommand("study", "simulate and normalize last-exit times");
        add_config_flags(st, c_study);
        add_run_flags(st, c_study);
        st->add_option("--format", c_study.format, "json summary or csv per replicate")
            ->check(CLI::IsMember({"json", "csv"}));
        st->callback([&] { run_study_cmd(c_study); });

        std::string lemma = "all";
        double delta2 = 0.05;
        bool gamma_alias = false;
        CLI::App* vf = app.add_subcommand("verify", "numerical expansion checks (JSON)");
        add_config_flags(vf, c_verify);
        add_run_flags(vf, c_verify);
        CLI::Option* lemma_opt =
            vf->add_option("--lemma", lemma, "gamma, prop, r, pp-tail, slepian, or all")
                ->check(CLI::IsMember({"gamma", "prop", "r", "pp-tail", "slepian", "all"}));
        vf->add_flag("--gamma-ladder", gamma_alias, "shorthand for --lemma gamma")
            ->excludes(lemma_opt);
        vf->add_option("--delta2", delta2, "inflated cross-correlation for the ordering check")
            ->check(CLI::Range(0.0, 0.999));
        vf->callback([&] { run_verify(c_verify, gamma_alias ? "gamma" : lemma, delta2); });

        CLI::App* ce = app.add_subcommand("certify", "model and boundary certificates (JSON)");
        add_config_flags(ce, c_certify);
        ce->callback([&] { run_certify(c_certify); });

        CLI::App* gl = app.add_subcommand("gamma-ladder", "critical level vs asymptotics (CSV)");
        add_config_flags(gl, c_gamma);
        gl->callback([&] { run_gamma_ladder(c_gamma); });

        std::vector<double> r_values;
        CLI::App* lr = app.add_subcommand("check-lemma-r", "shift expansion residuals (CSV)");
        add_config_flags(lr, c_lemr);
        lr->add_option("--r", r_values, "offsets R (default -1 0 1)");
        lr->callback([&] { run_check_lemma_r(c_lemr, r_values); });

        double spacing = 0.0, b_off = 0.0, c_off = 0.0, theta = 0.0;
        CLI::App* lp = app.add_subcommand("verify-lemma-prop", "discrete-sum law check (CSV)");
        add_config_flags(lp, c_lemp);
        lp->add_option("--spacing", spacing, "grid spacing a (default: auto-calibrated)");
        lp->add_option("--b-off", b_off, "grid origin offset");
        lp->add_option("--c-off", c_off, "level offset multiplying eps");
        lp->add_option("--theta", theta, "expansion point (default: centering time)");
        lp->callback([&] { run_verify_lemma_prop(c_lemp, spacing, b_off, c_off, theta); });

        std::string in_path;
        CLI::App* sa = app.add_subcommand("stats", "refit a study CSV against its limit law");
        add_config_flags(sa, c_stats);
        sa->add_option("--in", in_path, "study CSV produced by the study subcommand")
            ->required();
        sa->callback([&] { run_stats(c_stats, in_path); });

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int rc = app.exit(e);
            return rc == 0 ? 0 : 2;
        }
        return 0;
    } catch (const lastexit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
