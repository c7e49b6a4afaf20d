#include "hybridrec.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "core/evaluate.hpp"
#include "core/model_io.hpp"
#include "core/synthetic.hpp"

using namespace hybridrec;

struct hr_dataset {
    Dataset data;
    std::vector<RawRating> train_raw;
    std::vector<RawRating> test_raw;
};

struct hr_model {
    TrainedModel model;
};

struct hr_report {
    EvalReport report;
};

namespace {

thread_local std::string g_error = "no error";

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Bad enum values and null pointers are caller bugs, reported as
// HR_ERR_INVALID_ARG rather than as domain errors.
struct ArgError {
    std::string msg;
};

hr_status status_from(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return HR_ERR_IO;
        case ErrorKind::Parse: return HR_ERR_PARSE;
        case ErrorKind::Range: return HR_ERR_RANGE;
        case ErrorKind::Config: return HR_ERR_CONFIG;
        case ErrorKind::Usage: return HR_ERR_USAGE;
        case ErrorKind::Solver: return HR_ERR_SOLVER;
        case ErrorKind::Diverged: return HR_ERR_DIVERGED;
    }
    return HR_ERR_INTERNAL;
}

template <typename F>
hr_status guarded(F&& f) {
    try {
        f();
        return HR_OK;
    } catch (const ArgError& e) {
        g_error = e.msg;
        return HR_ERR_INVALID_ARG;
    } catch (const Error& e) {
        g_error = e.what();
        return status_from(e.kind());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return HR_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return HR_ERR_INTERNAL;
    }
}

hr_status null_arg(const char* what) {
    g_error = std::string(what) + " must not be NULL";
    return HR_ERR_INVALID_ARG;
}

int check_enum(int value, int max, const char* what) {
    if (value < 0 || value > max)
        throw ArgError{std::string(what) + " value " + std::to_string(value) + " out of range"};
    return value;
}

FileFormat format_from(int format) {
    check_enum(format, 1, "format");
    return format == 0 ? FileFormat::MovieTweetings : FileFormat::Csv;
}

ExperimentConfig config_from(const hr_params& p) {
    ExperimentConfig c;
    c.algo = static_cast<Algo>(check_enum(p.algo, 5, "algo"));
    c.baseline_mode = check_enum(p.baseline_mode, 1, "baseline_mode") == 0
                          ? BaselineMode::Offsets
                          : BaselineMode::MeanSum;
    c.shrink = p.shrink;
    c.top_n = p.top_n;
    c.k = p.k;
    c.lambda = p.lambda;
    c.als_targets =
        check_enum(p.als_targets, 1, "als_targets") == 0 ? AlsTargets::Residual : AlsTargets::Raw;
    c.als_init = check_enum(p.als_init, 1, "als_init") == 0 ? FactorInit::Constant
                                                            : FactorInit::SeededUniform;
    c.init_value = p.init_value;
    c.lambda1 = p.lambda1;
    c.lambda2 = p.lambda2;
    c.lambda3 = p.lambda3;
    c.lambda4 = p.lambda4;
    c.r1 = p.r1;
    c.r2 = p.r2;
    c.r3 = p.r3;
    c.r4 = p.r4;
    c.a_reg_center =
        check_enum(p.a_reg_center, 1, "a_reg_center") == 0 ? ARegCenter::Zero : ARegCenter::One;
    c.max_iter = p.max_iter;
    c.epsilon = p.epsilon;
    c.seed = p.seed;
    c.select_by =
        check_enum(p.select_by, 1, "select_by") == 0 ? SelectBy::MinTestMae : SelectBy::Final;
    c.clamp = p.clamp != 0;
    return c;
}

void model_dims(const TrainedModel& m, size_t& users, size_t& items) {
    struct Visitor {
        size_t& u;
        size_t& i;
        void operator()(const BiasModel& b) const {
            u = b.user_mean.size();
            i = b.item_mean.size();
        }
        void operator()(const CfModel& c) const {
            u = c.bias.user_mean.size();
            i = c.bias.item_mean.size();
        }
        void operator()(const FactorModel& f) const {
            u = f.num_users();
            i = f.num_items();
        }
        void operator()(const IntegratedModel& im) const {
            u = im.bu.size();
            i = im.bi.size();
        }
    };
    std::visit(Visitor{users, items}, m);
}

void check_universe(const TrainedModel& m, const Dataset& data) {
    size_t users = 0, items = 0;
    model_dims(m, users, items);
    if (users != data.train.num_users || items != data.train.num_items)
        fail(ErrorKind::Usage, "model covers " + std::to_string(users) + " users x " +
                                   std::to_string(items) +
                                   " items but the dataset has " +
                                   std::to_string(data.train.num_users) + " x " +
                                   std::to_string(data.train.num_items) +
                                   "; pass the training data the model was built from");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* hr_last_error(void) { return g_error.c_str(); }

const char* hr_version(void) { return "1.0.0"; }

hr_status hr_params_init(hr_params* params, int algo) {
    if (!params) return null_arg("params");
    return guarded([&] {
        ExperimentConfig c = default_config(static_cast<Algo>(check_enum(algo, 5, "algo")));
        hr_params p{};
        p.algo = algo;
        p.baseline_mode = c.baseline_mode == BaselineMode::Offsets ? 0 : 1;
        p.shrink = c.shrink;
        p.top_n = c.top_n;
        p.k = c.k;
        p.lambda = c.lambda;
        p.als_targets = c.als_targets == AlsTargets::Residual ? 0 : 1;
        p.als_init = c.als_init == FactorInit::Constant ? 0 : 1;
        p.init_value = c.init_value;
        p.lambda1 = c.lambda1;
        p.lambda2 = c.lambda2;
        p.lambda3 = c.lambda3;
        p.lambda4 = c.lambda4;
        p.r1 = c.r1;
        p.r2 = c.r2;
        p.r3 = c.r3;
        p.r4 = c.r4;
        p.a_reg_center = c.a_reg_center == ARegCenter::Zero ? 0 : 1;
        p.max_iter = c.max_iter;
        p.epsilon = c.epsilon;
        p.seed = c.seed;
        p.select_by = c.select_by == SelectBy::MinTestMae ? 0 : 1;
        p.clamp = c.clamp ? 1 : 0;
        *params = p;
    });
}

hr_status hr_dataset_load(const char* train_path, const char* test_path, int format,
                          hr_dataset** out) {
    if (!train_path) return null_arg("train_path");
    if (!out) return null_arg("out");
    return guarded([&] {
        FileFormat fmt = format_from(format);
        auto ds = std::make_unique<hr_dataset>();
        ds->train_raw = parse_ratings_file(train_path, fmt);
        if (test_path) {
            ds->test_raw = parse_ratings_file(test_path, fmt);
            ds->data = build_dataset(ds->train_raw, ds->test_raw);
        } else {
            ds->data = build_dataset_train_only(ds->train_raw);
        }
        *out = ds.release();
    });
}

hr_status hr_dataset_generate(unsigned users, unsigned items, unsigned k_true, double density,
                              double noise_sd, int mixture, unsigned long long seed,
                              hr_dataset** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        GenParams params;
        params.users = users;
        params.items = items;
        params.k_true = k_true;
        params.density = density;
        params.noise_sd = noise_sd;
        params.mixture = static_cast<MixtureProfile>(check_enum(mixture, 3, "mixture"));
        params.seed = seed;
        GeneratedData gen = generate_synthetic(params);
        auto ds = std::make_unique<hr_dataset>();
        ds->data = std::move(gen.dataset);
        ds->train_raw = std::move(gen.train_raw);
        ds->test_raw = std::move(gen.test_raw);
        *out = ds.release();
    });
}

hr_status hr_dataset_write(const hr_dataset* ds, const char* train_path, const char* test_path,
                           int format) {
    if (!ds) return null_arg("ds");
    if (!train_path) return null_arg("train_path");
    return guarded([&] {
        FileFormat fmt = format_from(format);
        write_ratings_file(ds->train_raw, train_path, fmt);
        if (test_path) write_ratings_file(ds->test_raw, test_path, fmt);
    });
}

hr_status hr_dataset_stats(const hr_dataset* ds, unsigned* users, unsigned* items,
                           unsigned long long* train_size, unsigned long long* test_size,
                           unsigned long long* pruned) {
    if (!ds) return null_arg("ds");
    if (users) *users = ds->data.train.num_users;
    if (items) *items = ds->data.train.num_items;
    if (train_size) *train_size = ds->data.train.size();
    if (test_size) *test_size = ds->data.test.size();
    if (pruned) *pruned = ds->data.test_records_pruned;
    return HR_OK;
}

void hr_dataset_free(hr_dataset* ds) { delete ds; }

hr_status hr_train(const hr_dataset* ds, const hr_params* params, hr_model** model_out,
                   hr_report** report_out) {
    if (!ds) return null_arg("ds");
    if (!params) return null_arg("params");
    if (!model_out) return null_arg("model_out");
    return guarded([&] {
        ExperimentConfig cfg = config_from(*params);
        EvalReport rep;
        rep.algo = cfg.algo;
        rep.params = cfg;
        rep.train_size = ds->data.train.size();
        rep.test_size = ds->data.test.size();

        auto start = std::chrono::steady_clock::now();
        FitTrace trace;
        TrainedModel model = train_model(ds->data, cfg, &trace);
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
        rep.per_epoch = std::move(trace.epochs);
        rep.converged = trace.converged;
        rep.selected_epoch = trace.selected_epoch;
        if (!ds->data.test.empty()) {
            EvalSummary s = evaluate_model(model, ds->data, cfg.clamp);
            rep.mae = s.mae;
            rep.coverage = s.coverage;
        } else {
            rep.mae = kNan;
            rep.coverage = kNan;
        }
        *model_out = new hr_model{std::move(model)};
        if (report_out) *report_out = new hr_report{std::move(rep)};
    });
}

hr_status hr_evaluate(const hr_model* model, const hr_dataset* ds, int clamp,
                      hr_report** report_out) {
    if (!model) return null_arg("model");
    if (!ds) return null_arg("ds");
    if (!report_out) return null_arg("report_out");
    return guarded([&] {
        check_universe(model->model, ds->data);
        EvalReport rep;
        rep.algo = model_algo(model->model);
        rep.has_params = false;
        rep.train_size = ds->data.train.size();
        rep.test_size = ds->data.test.size();
        auto start = std::chrono::steady_clock::now();
        EvalSummary s = evaluate_model(model->model, ds->data, clamp != 0);
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
        rep.mae = s.mae;
        rep.coverage = s.coverage;
        *report_out = new hr_report{std::move(rep)};
    });
}

hr_status hr_predict(const hr_model* model, const hr_dataset* ds, const char* user_id,
                     const char* item_id, double* out) {
    if (!model) return null_arg("model");
    if (!ds) return null_arg("ds");
    if (!user_id) return null_arg("user_id");
    if (!item_id) return null_arg("item_id");
    if (!out) return null_arg("out");
    return guarded([&] {
        check_universe(model->model, ds->data);
        const RatingsTable& train = ds->data.train;
        auto u = train.user_index.find(user_id);
        if (u == train.user_index.end())
            fail(ErrorKind::Usage, std::string("unknown user id '") + user_id + "'");
        auto i = train.item_index.find(item_id);
        if (i == train.item_index.end())
            fail(ErrorKind::Usage, std::string("unknown item id '") + item_id + "'");
        *out = predict_any(model->model, train, u->second, i->second).value;
    });
}

hr_status hr_model_save(const hr_model* model, const char* path) {
    if (!model) return null_arg("model");
    if (!path) return null_arg("path");
    return guarded([&] { save_model(model->model, path); });
}

hr_status hr_model_load(const char* path, hr_model** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    return guarded([&] { *out = new hr_model{load_model(path)}; });
}

hr_status hr_model_algo(const hr_model* model, int* out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    *out = static_cast<int>(model_algo(model->model));
    return HR_OK;
}

hr_status hr_model_save_neighbors(const hr_model* model, const char* path) {
    if (!model) return null_arg("model");
    if (!path) return null_arg("path");
    return guarded([&] {
        if (const auto* cf = std::get_if<CfModel>(&model->model))
            return save_neighbor_store(cf->store, path);
        if (const auto* im = std::get_if<IntegratedModel>(&model->model))
            return save_neighbor_store(im->store, path);
        fail(ErrorKind::Usage, "this model kind has no neighbor lists");
    });
}

void hr_model_free(hr_model* model) { delete model; }

double hr_report_mae(const hr_report* report) { return report ? report->report.mae : kNan; }

double hr_report_coverage(const hr_report* report) {
    return report ? report->report.coverage : kNan;
}

hr_status hr_report_to_json(const hr_report* report, int include_timings, char** out) {
    if (!report) return null_arg("report");
    if (!out) return null_arg("out");
    return guarded([&] { *out = dup_string(report_to_json(report->report, include_timings != 0)); });
}

hr_status hr_report_write_json(const hr_report* report, const char* path, int include_timings) {
    if (!report) return null_arg("report");
    if (!path) return null_arg("path");
    return guarded([&] {
        std::string json = report_to_json(report->report, include_timings != 0);
        FILE* f = std::fopen(path, "wb");
        if (!f) fail(ErrorKind::Io, std::string("cannot open '") + path + "' for writing");
        size_t written = std::fwrite(json.data(), 1, json.size(), f);
        int rc = std::fclose(f);
        if (written != json.size() || rc != 0)
            fail(ErrorKind::Io, std::string("write error on '") + path + "'");
    });
}

void hr_report_free(hr_report* report) { delete report; }

void hr_string_free(char* s) { std::free(s); }

hr_status hr_sweep(const hr_dataset* ds, const hr_params* base, int axis, const unsigned* values,
                   size_t n_values, const int* algos, size_t n_algos, unsigned jobs,
                   const char* csv_path, char** csv_out) {
    if (!ds) return null_arg("ds");
    if (!base) return null_arg("base");
    if (!values && n_values) return null_arg("values");
    if (!algos && n_algos) return null_arg("algos");
    if (!csv_path && !csv_out) return null_arg("one of csv_path and csv_out");
    return guarded([&] {
        SweepSpec spec;
        spec.axis = check_enum(axis, 1, "axis") == 0 ? SweepAxis::N : SweepAxis::K;
        spec.values.assign(values, values + n_values);
        spec.base = config_from(*base);
        std::vector<Algo> algo_list;
        for (size_t i = 0; i < n_algos; ++i)
            algo_list.push_back(static_cast<Algo>(check_enum(algos[i], 5, "algo")));

        std::string csv = sweep_to_csv(run_sweep(ds->data, spec, algo_list, jobs ? jobs : 1));
        if (csv_path) {
            FILE* f = std::fopen(csv_path, "wb");
            if (!f) fail(ErrorKind::Io, std::string("cannot open '") + csv_path + "' for writing");
            size_t written = std::fwrite(csv.data(), 1, csv.size(), f);
            int rc = std::fclose(f);
            if (written != csv.size() || rc != 0)
                fail(ErrorKind::Io, std::string("write error on '") + csv_path + "'");
        }
        if (csv_out) *csv_out = dup_string(csv);
    });
}

}  // extern "C"
