// hrec: train, evaluate, sweep, and generate data for the rating
// predictors in libhybridrec. Uses only the public C API.

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hybridrec.h"

namespace {

// RAII for the C handles so early returns stay leak-free.
struct DatasetPtr {
    hr_dataset* p = nullptr;
    ~DatasetPtr() { hr_dataset_free(p); }
};
struct ModelPtr {
    hr_model* p = nullptr;
    ~ModelPtr() { hr_model_free(p); }
};
struct ReportPtr {
    hr_report* p = nullptr;
    ~ReportPtr() { hr_report_free(p); }
};

int report_failure(hr_status rc) {
    std::fprintf(stderr, "error: %s\n", hr_last_error());
    return static_cast<int>(rc);
}

#define HR_TRY(call)                                   \
    do {                                               \
        hr_status rc_ = (call);                        \
        if (rc_ != HR_OK) return report_failure(rc_);  \
    } while (0)

const std::map<std::string, int> kAlgoMap{{"baseline", HR_ALGO_BASELINE},
                                          {"cf_user", HR_ALGO_CF_USER},
                                          {"cf_item", HR_ALGO_CF_ITEM},
                                          {"mf_als", HR_ALGO_MF_ALS},
                                          {"cf_mf_v1", HR_ALGO_CF_MF_V1},
                                          {"cf_mf_v2", HR_ALGO_CF_MF_V2}};
const std::map<std::string, int> kFormatMap{{"movietweetings", HR_FORMAT_MOVIETWEETINGS},
                                            {"csv", HR_FORMAT_CSV}};
const std::map<std::string, int> kSelectByMap{{"min-test-mae", 0}, {"final", 1}};
const std::map<std::string, int> kBaselineModeMap{{"offsets", 0}, {"mean-sum", 1}};
const std::map<std::string, int> kAlsTargetsMap{{"residual", 0}, {"raw", 1}};
const std::map<std::string, int> kAlsInitMap{{"constant", 0}, {"seeded-uniform", 1}};
const std::map<std::string, int> kARegCenterMap{{"zero", 0}, {"one", 1}};
const std::map<std::string, int> kMixtureMap{{"pure-bias", HR_MIX_PURE_BIAS},
                                             {"pure-factor", HR_MIX_PURE_FACTOR},
                                             {"pure-neighbor", HR_MIX_PURE_NEIGHBOR},
                                             {"per-user", HR_MIX_PER_USER}};
const std::map<std::string, int> kAxisMap{{"n", 0}, {"k", 1}};

// Hyperparameter flags shared by train/eval/sweep. Each flag remembers
// whether it was set (on the command line or via --config) so unset
// ones keep the per-algorithm defaults from hr_params_init.
struct ParamFlags {
    int baseline_mode = 0;
    double shrink = 0.0;
    unsigned top_n = 0;
    unsigned k = 0;
    double lambda = 0.0;
    int als_targets = 0;
    int als_init = 0;
    double init_value = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0, lambda4 = 0.0;
    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
    int a_reg_center = 0;
    unsigned max_iter = 0;
    double epsilon = 0.0;
    unsigned long long seed = 0;
    int select_by = 0;
    bool clamp = false;

    CLI::Option* o_baseline_mode = nullptr;
    CLI::Option* o_shrink = nullptr;
    CLI::Option* o_top_n = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_lambda = nullptr;
    CLI::Option* o_als_targets = nullptr;
    CLI::Option* o_als_init = nullptr;
    CLI::Option* o_init_value = nullptr;
    CLI::Option* o_lambda1 = nullptr;
    CLI::Option* o_lambda2 = nullptr;
    CLI::Option* o_lambda3 = nullptr;
    CLI::Option* o_lambda4 = nullptr;
    CLI::Option* o_r1 = nullptr;
    CLI::Option* o_r2 = nullptr;
    CLI::Option* o_r3 = nullptr;
    CLI::Option* o_r4 = nullptr;
    CLI::Option* o_a_reg_center = nullptr;
    CLI::Option* o_max_iter = nullptr;
    CLI::Option* o_epsilon = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_select_by = nullptr;
    CLI::Option* o_clamp = nullptr;

    void add_to(CLI::App& cmd) {
        o_top_n = cmd.add_option("--top-n,-N", top_n, "Neighbor list length N");
        o_k = cmd.add_option("--k,-K", k, "Latent factor count K");
        o_shrink = cmd.add_option("--shrink", shrink, "Similarity shrink constant");
        o_baseline_mode =
            cmd.add_option("--baseline-mode", baseline_mode,
                           "Bias combination: offsets (default) or the mean-sum study knob")
                ->transform(CLI::CheckedTransformer(kBaselineModeMap, CLI::ignore_case));
        o_lambda = cmd.add_option("--lambda", lambda, "Least-squares regularization (mf_als)");
        o_als_targets =
            cmd.add_option("--als-targets", als_targets,
                           "Fit factors to residual (default) or raw ratings (mf_als)")
                ->transform(CLI::CheckedTransformer(kAlsTargetsMap, CLI::ignore_case));
        o_als_init = cmd.add_option("--als-init", als_init,
                                    "Factor init: constant (default) or seeded-uniform (mf_als)")
                         ->transform(CLI::CheckedTransformer(kAlsInitMap, CLI::ignore_case));
        o_init_value =
            cmd.add_option("--init-value", init_value, "Factor init scale; <= 0 means 1/K");
        o_lambda1 = cmd.add_option("--lambda1", lambda1, "Bias regularization (cf_mf_*)");
        o_lambda2 = cmd.add_option("--lambda2", lambda2, "Factor regularization (cf_mf_*)");
        o_lambda3 = cmd.add_option("--lambda3", lambda3, "Neighbor-weight regularization (cf_mf_*)");
        o_lambda4 = cmd.add_option("--lambda4", lambda4, "Blend-weight regularization (cf_mf_v2)");
        o_r1 = cmd.add_option("--lr1", r1, "Bias learning rate (cf_mf_*)");
        o_r2 = cmd.add_option("--lr2", r2, "Factor learning rate (cf_mf_*)");
        o_r3 = cmd.add_option("--lr3", r3, "Neighbor-weight learning rate (cf_mf_*)");
        o_r4 = cmd.add_option("--lr4", r4, "Blend-weight learning rate (cf_mf_v2)");
        o_a_reg_center =
            cmd.add_option("--a-reg-center", a_reg_center,
                           "Regularize blend weights toward zero (default) or one (cf_mf_v2)")
                ->transform(CLI::CheckedTransformer(kARegCenterMap, CLI::ignore_case));
        o_max_iter = cmd.add_option("--max-iter", max_iter, "Training epoch/sweep cap");
        o_epsilon = cmd.add_option("--epsilon", epsilon, "Relative objective convergence bound");
        o_seed = cmd.add_option("--seed", seed,
                                "RNG seed (seeded-uniform init; nonzero shuffles SGD order)");
        o_select_by = cmd.add_option("--select-by", select_by,
                                     "Keep the min-test-mae epoch (default) or the final one")
                          ->transform(CLI::CheckedTransformer(kSelectByMap, CLI::ignore_case));
        o_clamp = cmd.add_flag("--clamp", clamp, "Clamp predictions to [0, 10] at evaluation");
    }

    // Defaults first, then only what the user actually set.
    hr_params resolve(int algo) const {
        hr_params p;
        hr_params_init(&p, algo);
        if (*o_baseline_mode) p.baseline_mode = baseline_mode;
        if (*o_shrink) p.shrink = shrink;
        if (*o_top_n) p.top_n = top_n;
        if (*o_k) p.k = k;
        if (*o_lambda) p.lambda = lambda;
        if (*o_als_targets) p.als_targets = als_targets;
        if (*o_als_init) p.als_init = als_init;
        if (*o_init_value) p.init_value = init_value;
        if (*o_lambda1) p.lambda1 = lambda1;
        if (*o_lambda2) p.lambda2 = lambda2;
        if (*o_lambda3) p.lambda3 = lambda3;
        if (*o_lambda4) p.lambda4 = lambda4;
        if (*o_r1) p.r1 = r1;
        if (*o_r2) p.r2 = r2;
        if (*o_r3) p.r3 = r3;
        if (*o_r4) p.r4 = r4;
        if (*o_a_reg_center) p.a_reg_center = a_reg_center;
        if (*o_max_iter) p.max_iter = max_iter;
        if (*o_epsilon) p.epsilon = epsilon;
        if (*o_seed) p.seed = seed;
        if (*o_select_by) p.select_by = select_by;
        if (*o_clamp) p.clamp = clamp ? 1 : 0;
        return p;
    }
};

struct IoFlags {
    std::string train_path;
    std::string test_path;
    int format = HR_FORMAT_MOVIETWEETINGS;

    void add_to(CLI::App& cmd, bool test_required) {
        cmd.add_option("--train", train_path, "Training ratings file")
            ->required()
            ->check(CLI::ExistingFile);
        auto* t = cmd.add_option("--test", test_path, "Held-out ratings file");
        if (test_required)
            t->required()->check(CLI::ExistingFile);
        else
            t->check(CLI::ExistingFile);
        cmd.add_option("--format", format, "Ratings file format")
            ->transform(CLI::CheckedTransformer(kFormatMap, CLI::ignore_case));
    }

    int load(hr_dataset** out) const {
        return static_cast<int>(hr_dataset_load(
            train_path.c_str(), test_path.empty() ? nullptr : test_path.c_str(), format, out));
    }
};

const char* algo_label(int algo) {
    for (const auto& [name, value] : kAlgoMap)
        if (value == algo) return name.c_str();
    return "?";
}

void print_summary(int algo, const hr_report* report) {
    double mae = hr_report_mae(report);
    double coverage = hr_report_coverage(report);
    if (std::isnan(mae))
        std::printf("%s: trained (no test data)\n", algo_label(algo));
    else
        std::printf("%s: mae=%.6f coverage=%.4f\n", algo_label(algo), mae, coverage);
}

int run_train(const IoFlags& io, const ParamFlags& flags, int algo, const std::string& model_path,
              const std::string& report_path, const std::string& neighbors_path, bool timings) {
    DatasetPtr ds;
    HR_TRY(static_cast<hr_status>(io.load(&ds.p)));
    hr_params params = flags.resolve(algo);
    ModelPtr model;
    ReportPtr report;
    HR_TRY(hr_train(ds.p, &params, &model.p, &report.p));
    if (!model_path.empty()) HR_TRY(hr_model_save(model.p, model_path.c_str()));
    if (!neighbors_path.empty()) HR_TRY(hr_model_save_neighbors(model.p, neighbors_path.c_str()));
    if (!report_path.empty())
        HR_TRY(hr_report_write_json(report.p, report_path.c_str(), timings ? 1 : 0));
    print_summary(algo, report.p);
    return 0;
}

int run_eval(const IoFlags& io, const std::string& model_path, const std::string& report_path,
             bool clamp, bool timings) {
    DatasetPtr ds;
    HR_TRY(static_cast<hr_status>(io.load(&ds.p)));
    ModelPtr model;
    HR_TRY(hr_model_load(model_path.c_str(), &model.p));
    int algo = 0;
    HR_TRY(hr_model_algo(model.p, &algo));
    ReportPtr report;
    HR_TRY(hr_evaluate(model.p, ds.p, clamp ? 1 : 0, &report.p));
    if (!report_path.empty())
        HR_TRY(hr_report_write_json(report.p, report_path.c_str(), timings ? 1 : 0));
    print_summary(algo, report.p);
    return 0;
}

int run_sweep_cmd(const IoFlags& io, const ParamFlags& flags, const std::vector<int>& algos,
                  int axis, const std::vector<unsigned>& values, unsigned jobs,
                  const std::string& csv_path) {
    DatasetPtr ds;
    HR_TRY(static_cast<hr_status>(io.load(&ds.p)));
    // The held-constant config starts from the first algorithm's
    // defaults; every explicit flag applies to all cells.
    hr_params base = flags.resolve(algos.front());
    char* csv = nullptr;
    HR_TRY(hr_sweep(ds.p, &base, axis, values.data(), values.size(), algos.data(), algos.size(),
                    jobs, csv_path.empty() ? nullptr : csv_path.c_str(),
                    csv_path.empty() ? &csv : nullptr));
    if (csv) {
        std::fputs(csv, stdout);
        hr_string_free(csv);
    } else {
        std::printf("wrote %zu sweep rows to %s\n", algos.size() * values.size(),
                    csv_path.c_str());
    }
    return 0;
}

int run_gen(unsigned users, unsigned items, unsigned rank, double density, double noise_sd,
            int mixture, unsigned long long seed, const std::string& prefix, int format) {
    DatasetPtr ds;
    HR_TRY(hr_dataset_generate(users, items, rank, density, noise_sd, mixture, seed, &ds.p));
    const char* ext = format == HR_FORMAT_CSV ? ".csv" : ".dat";
    std::string train_path = prefix + "_train" + ext;
    std::string test_path = prefix + "_test" + ext;
    HR_TRY(hr_dataset_write(ds.p, train_path.c_str(), test_path.c_str(), format));
    unsigned u = 0, i = 0;
    unsigned long long train_n = 0, test_n = 0;
    HR_TRY(hr_dataset_stats(ds.p, &u, &i, &train_n, &test_n, nullptr));
    std::printf("generated %u users x %u items: %llu train -> %s, %llu test -> %s\n", u, i,
                train_n, train_path.c_str(), test_n, test_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rating prediction: bias, neighborhood, factor, and blended models"};
    app.require_subcommand(1);

    std::string algo_str;
    std::string model_path, report_path, neighbors_path, csv_path;
    bool timings = false;
    bool clamp_eval = false;

    // train
    auto* train = app.add_subcommand("train", "Train a model (and evaluate if --test is given)");
    train->set_config("--config", "", "Read options from an INI config file; flags win");
    IoFlags train_io;
    train_io.add_to(*train, /*test_required=*/false);
    int train_algo = 0;
    train->add_option("--algo", train_algo, "Algorithm to train")
        ->required()
        ->transform(CLI::CheckedTransformer(kAlgoMap, CLI::ignore_case));
    ParamFlags train_flags;
    train_flags.add_to(*train);
    train->add_option("--model", model_path, "Write the trained model here");
    train->add_option("--out", report_path, "Write the evaluation report (JSON) here");
    train->add_option("--neighbors-out", neighbors_path,
                      "Write the model's neighbor lists as text here");
    train->add_flag("--timings", timings, "Include wall-clock seconds in the report");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a saved model on held-out data");
    eval->set_config("--config", "", "Read options from an INI config file; flags win");
    IoFlags eval_io;
    eval_io.add_to(*eval, /*test_required=*/true);
    eval->add_option("--model", model_path, "Model file to load")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--out", report_path, "Write the evaluation report (JSON) here");
    eval->add_flag("--clamp", clamp_eval, "Clamp predictions to [0, 10]");
    eval->add_flag("--timings", timings, "Include wall-clock seconds in the report");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Re-train across neighbor or factor counts");
    sweep->set_config("--config", "", "Read options from an INI config file; flags win");
    IoFlags sweep_io;
    sweep_io.add_to(*sweep, /*test_required=*/true);
    std::vector<int> sweep_algos;
    sweep->add_option("--algo", sweep_algos, "Algorithms to sweep (repeat or comma-separate)")
        ->required()
        ->delimiter(',')
        ->transform(CLI::CheckedTransformer(kAlgoMap, CLI::ignore_case));
    int sweep_axis = 0;
    sweep->add_option("--axis", sweep_axis, "Swept knob: n (neighbors) or k (factors)")
        ->required()
        ->transform(CLI::CheckedTransformer(kAxisMap, CLI::ignore_case));
    std::vector<unsigned> sweep_values;
    sweep->add_option("--values", sweep_values, "Swept values, strictly increasing")
        ->required()
        ->delimiter(',');
    unsigned jobs = 1;
    sweep->add_option("--jobs", jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);
    ParamFlags sweep_flags;
    sweep_flags.add_to(*sweep);
    sweep->add_option("--out", csv_path, "Write sweep CSV here (default: stdout)");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic ratings dataset");
    gen->set_config("--config", "", "Read options from an INI config file; flags win");
    unsigned gen_users = 100, gen_items = 100, gen_rank = 2;
    double gen_density = 0.1, gen_noise = 0.5;
    int gen_mixture = HR_MIX_PER_USER;
    unsigned long long gen_seed = 1;
    std::string gen_prefix;
    int gen_format = HR_FORMAT_MOVIETWEETINGS;
    gen->add_option("--users", gen_users, "User count")->check(CLI::PositiveNumber);
    gen->add_option("--items", gen_items, "Item count")->check(CLI::PositiveNumber);
    gen->add_option("--rank", gen_rank, "Latent rank of the factor signal")
        ->check(CLI::PositiveNumber);
    gen->add_option("--density", gen_density, "Cell inclusion probability in (0, 1]");
    gen->add_option("--noise-sd", gen_noise, "Gaussian noise level");
    gen->add_option("--mixture", gen_mixture, "Signal blend profile")
        ->transform(CLI::CheckedTransformer(kMixtureMap, CLI::ignore_case));
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--out", gen_prefix, "Output path prefix (writes <prefix>_train/_test)")
        ->required();
    gen->add_option("--format", gen_format, "Output file format")
        ->transform(CLI::CheckedTransformer(kFormatMap, CLI::ignore_case));

    CLI11_PARSE(app, argc, argv);

    if (*train)
        return run_train(train_io, train_flags, train_algo, model_path, report_path,
                         neighbors_path, timings);
    if (*eval) return run_eval(eval_io, model_path, report_path, clamp_eval, timings);
    if (*sweep)
        return run_sweep_cmd(sweep_io, sweep_flags, sweep_algos, sweep_axis, sweep_values, jobs,
                             csv_path);
    if (*gen)
        return run_gen(gen_users, gen_items, gen_rank, gen_density, gen_noise, gen_mixture,
                       gen_seed, gen_prefix, gen_format);
    return 0;
}
