// rss-sentry: command-line front end over the librss_sentry C API.
//
// Subcommands: deltap, simulate, quantize, estimate, mc, crb, sweep-noise,
// sweep-step, sweep-rate, contour, rerun. Data goes to stdout or, with -o,
// to a file written atomically together with a .manifest.json sidecar that
// is sufficient to re-run the command bit-identically (see `rerun`).
//
// Exit codes: 0 success, 1 domain/usage error, 2 I/O error, 3 numeric error.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rss_sentry.h"

using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CliError {
    int code;
    std::string message;
};

void check(rss_status st) {
    if (st != RSS_OK) throw CliError{static_cast<int>(st), rss_last_error()};
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw CliError{1, "cannot parse grid value '" + item + "'"};
        }
        values.push_back(v);
    }
    if (values.empty()) throw CliError{1, "empty grid"};
    return values;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw CliError{1, "invalid log grid"};
    std::vector<double> g(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i) {
        g[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    }
    return g;
}

// Atomic file write: full content lands or nothing does.
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw CliError{2, "cannot open '" + tmp + "' for writing"};
        out << content;
        if (!out) throw CliError{2, "write failure on '" + tmp + "'"};
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw CliError{2, "cannot rename onto '" + path + "'"};
    }
}

rss_sine_params params_from(const json& p) {
    rss_sine_params s{};
    s.amplitude_db = p.value("a_db", 0.0);
    s.dc_offset_db = p.value("b_db", 0.0);
    s.frequency_hz = p.value("f_hz", 0.0);
    s.phase_rad = p.value("phase_rad", 0.0);
    return s;
}

rss_acquisition acq_from(const json& p) {
    rss_acquisition a{};
    a.sample_rate_hz = p.value("fs_hz", 0.0);
    a.num_samples = p.value("n", static_cast<uint64_t>(0));
    a.noise_std_db = p.value("sigma_db", 0.0);
    a.rng_seed = p.value("seed", static_cast<uint64_t>(0));
    return a;
}

rss_avg_options avg_from(const json& p) {
    rss_avg_options o{};
    o.grid_phases = p.value("grid_phases", 32);
    o.grid_offsets = p.value("grid_offsets", 33);
    o.average_fim = p.value("avg_mode", std::string("crb")) == "fim" ? 1 : 0;
    o.threads = p.value("threads", 0);
    return o;
}

rss_nyquist_policy nyquist_from(const json& p) {
    return p.value("nyquist", std::string("reject")) == "scale" ? RSS_NYQUIST_SCALE
                                                                : RSS_NYQUIST_REJECT;
}

json grid_to_json(const std::vector<double>& g) {
    json arr = json::array();
    for (double v : g) arr.push_back(v);
    return arr;
}

std::vector<double> grid_from_json(const json& arr) {
    std::vector<double> g;
    for (const auto& v : arr) g.push_back(v.get<double>());
    return g;
}

// ---------------------------------------------------------------------------
// Subcommand bodies: each renders its CSV from a resolved parameter set, so
// the normal path and `rerun` share one implementation.
// ---------------------------------------------------------------------------

std::string run_deltap(const json& p) {
    rss_vibration_scene scene{};
    scene.a = p.value("a", 1.0);
    scene.delta_z_m = p["dz_m"].get<double>();
    double lambda = 0.0;
    if (p.contains("wavelength_m")) {
        lambda = p["wavelength_m"].get<double>();
    } else {
        check(rss_wavelength_m(p["carrier_hz"].get<double>(), &lambda));
    }
    scene.wavelength_m = lambda;

    std::ostringstream out;
    if (p.value("expected", false)) {
        out << "beta,expected_delta_p_db\n";
        std::vector<double> betas;
        if (p.contains("beta_grid")) {
            betas = grid_from_json(p["beta_grid"]);
        } else {
            betas.push_back(p["beta"].get<double>());
        }
        for (double beta : betas) {
            scene.beta = beta;
            double v = 0.0;
            check(rss_expected_delta_p_db(&scene, &v));
            out << fmt(beta) << ',' << fmt(v) << '\n';
        }
        return out.str();
    }

    out << "beta,theta_rad,delta_p_db\n";
    scene.beta = p["beta"].get<double>();
    std::vector<double> thetas;
    if (p.contains("theta_rad")) {
        thetas.push_back(p["theta_rad"].get<double>());
    } else {
        const int count = p.value("theta_count", 181);
        for (int i = 0; i < count; ++i) {
            thetas.push_back(kPi * i / (count - 1));
        }
    }
    for (double theta : thetas) {
        scene.theta_rad = theta;
        double v = 0.0;
        check(rss_delta_p_db(&scene, &v));
        out << fmt(scene.beta) << ',' << fmt(theta) << ',' << fmt(v) << '\n';
    }
    return out.str();
}

std::string trace_to_csv(const rss_trace* trace) {
    std::ostringstream out;
    out << "t_s,rss_db\n";
    const double* values = rss_trace_values(trace);
    const double* times = rss_trace_times_s(trace);
    const size_t n = rss_trace_size(trace);
    for (size_t k = 0; k < n; ++k) {
        out << fmt(times[k]) << ',' << fmt(values[k]) << '\n';
    }
    return out.str();
}

std::string run_simulate(const json& p) {
    const rss_sine_params params = params_from(p);
    const rss_acquisition acq = acq_from(p);
    rss_trace* trace = nullptr;
    check(rss_trace_synthesize(&params, &acq, &trace));
    std::string csv = trace_to_csv(trace);
    rss_trace_free(trace);
    return csv;
}

std::string run_quantize(const json& p) {
    rss_trace* input = nullptr;
    check(rss_trace_load_csv(p["input"].get<std::string>().c_str(),
                             p.value("format", std::string("csv-rss")).c_str(), &input));
    rss_trace* output = nullptr;
    rss_status st;
    if (p.value("mode", std::string("one-bit")) == "uniform") {
        st = rss_trace_quantize_uniform(input, p.value("step_db", 1.0), &output);
    } else {
        st = rss_trace_quantize_one_bit(input, p.value("threshold_db", 0.0), &output);
    }
    rss_trace_free(input);
    check(st);
    std::string csv = trace_to_csv(output);
    rss_trace_free(output);
    return csv;
}

std::string run_estimate(const json& p) {
    rss_trace* input = nullptr;
    check(rss_trace_load_csv(p["input"].get<std::string>().c_str(),
                             p.value("format", std::string("csv-rss")).c_str(), &input));
    rss_estimate_result res{};
    const rss_method method =
        p.value("method", std::string("mle")) == "periodogram" ? RSS_METHOD_PERIODOGRAM
                                                               : RSS_METHOD_MLE;
    const rss_status st =
        rss_estimate(input, p.value("band_lo_hz", 0.0), p.value("band_hi_hz", 0.0),
                     p.value("sigma_db", 0.0), method, &res);
    rss_trace_free(input);
    check(st);

    std::ostringstream out;
    out << "method,a_db,b_db,f_hz,phase_rad,log_likelihood,converged,iterations\n";
    out << (method == RSS_METHOD_PERIODOGRAM ? "periodogram" : "mle") << ','
        << fmt(res.estimate.amplitude_db) << ',' << fmt(res.estimate.dc_offset_db) << ','
        << fmt(res.estimate.frequency_hz) << ',' << fmt(res.estimate.phase_rad) << ','
        << fmt(res.log_likelihood) << ',' << res.converged << ',' << res.iterations << '\n';
    return out.str();
}

std::string run_crb(const json& p) {
    const rss_sine_params params = params_from(p);
    const rss_acquisition acq = acq_from(p);
    std::ostringstream out;

    if (p.value("unquantized", false)) {
        rss_crb_result r{};
        check(rss_unquantized_crb(&params, &acq, &r));
        out << "a_db,f_hz,fs_hz,n,sigma_db,std_a_db,std_f_hz,crb_a_db2,crb_omega_rad2_s2\n";
        out << fmt(params.amplitude_db) << ',' << fmt(params.frequency_hz) << ','
            << fmt(acq.sample_rate_hz) << ',' << acq.num_samples << ','
            << fmt(acq.noise_std_db) << ',' << fmt(r.std_a_db) << ',' << fmt(r.std_f_hz) << ','
            << fmt(r.crb_a_db2) << ',' << fmt(r.crb_omega_rad2_s2) << '\n';
        return out.str();
    }
    if (p.value("point", false)) {
        rss_crb_result r{};
        check(rss_crb_point(&params, &acq, &r));
        out << "a_db,b_db,f_hz,phase_rad,fs_hz,n,sigma_db,std_a_db,std_f_hz,"
               "crb_a_db2,crb_omega_rad2_s2,condition\n";
        out << fmt(params.amplitude_db) << ',' << fmt(params.dc_offset_db) << ','
            << fmt(params.frequency_hz) << ',' << fmt(params.phase_rad) << ','
            << fmt(acq.sample_rate_hz) << ',' << acq.num_samples << ','
            << fmt(acq.noise_std_db) << ',' << fmt(r.std_a_db) << ',' << fmt(r.std_f_hz) << ','
            << fmt(r.crb_a_db2) << ',' << fmt(r.crb_omega_rad2_s2) << ',' << fmt(r.condition)
            << '\n';
        return out.str();
    }

    const rss_avg_options opts = avg_from(p);
    rss_avg_crb r{};
    check(rss_crb_averaged(&params, &acq, p["step_db"].get<double>(), &opts, &r));
    out << "a_db,f_hz,fs_hz,n,sigma_db,step_db,std_a_db,std_f_hz,"
           "crb_a_db2,crb_omega_rad2_s2,failed_fraction,flagged\n";
    out << fmt(params.amplitude_db) << ',' << fmt(params.frequency_hz) << ','
        << fmt(acq.sample_rate_hz) << ',' << acq.num_samples << ',' << fmt(acq.noise_std_db)
        << ',' << fmt(p["step_db"].get<double>()) << ',' << fmt(r.std_a_db) << ','
        << fmt(r.std_f_hz) << ',' << fmt(r.crb_a_db2) << ',' << fmt(r.crb_omega_rad2_s2) << ','
        << fmt(r.failed_fraction) << ',' << r.flagged << '\n';
    return out.str();
}

std::string run_sweep_noise(const json& p) {
    const rss_sine_params params = params_from(p);
    const rss_acquisition acq = acq_from(p);
    const rss_avg_options opts = avg_from(p);
    const std::vector<double> grid = grid_from_json(p["sigma_grid"]);

    std::vector<double> std_a(grid.size()), std_f(grid.size()), failed(grid.size());
    std::vector<int> flagged(grid.size());
    check(rss_sweep_noise(&params, &acq, p["step_db"].get<double>(), grid.data(), grid.size(),
                          &opts, std_a.data(), std_f.data(), failed.data(), flagged.data()));

    std::ostringstream out;
    out << "sigma_db,std_a_db,std_f_hz,failed_fraction,flagged\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        out << fmt(grid[i]) << ',' << fmt(std_a[i]) << ',' << fmt(std_f[i]) << ','
            << fmt(failed[i]) << ',' << flagged[i] << '\n';
    }
    return out.str();
}

std::string run_sweep_step(const json& p) {
    const rss_sine_params params = params_from(p);
    const rss_acquisition acq = acq_from(p);
    const rss_avg_options opts = avg_from(p);
    const std::vector<double> grid = grid_from_json(p["delta_grid"]);

    std::vector<double> sig_opt(grid.size()), min_a(grid.size()), min_f(grid.size());
    std::vector<int> flagged(grid.size());
    check(rss_sweep_step(&params, &acq, grid.data(), grid.size(), &opts, sig_opt.data(),
                         min_a.data(), min_f.data(), flagged.data()));

    std::ostringstream out;
    out << "step_db,sigma_opt_db,min_std_a_db,min_std_f_hz,flagged\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        out << fmt(grid[i]) << ',' << fmt(sig_opt[i]) << ',' << fmt(min_a[i]) << ','
            << fmt(min_f[i]) << ',' << flagged[i] << '\n';
    }
    return out.str();
}

std::string run_sweep_rate(const json& p) {
    const rss_sine_params params = params_from(p);
    const rss_avg_options opts = avg_from(p);
    const std::vector<double> grid = grid_from_json(p["fs_grid"]);

    std::vector<double> f_eff(grid.size()), std_a(grid.size()), std_f(grid.size());
    std::vector<uint64_t> n_samples(grid.size());
    std::vector<int> flagged(grid.size());
    check(rss_sweep_rate(&params, p["sigma_db"].get<double>(), p["step_db"].get<double>(),
                         grid.data(), grid.size(), p.value("t_obs_s", 1.0), nyquist_from(p),
                         &opts, f_eff.data(), n_samples.data(), std_a.data(), std_f.data(),
                         flagged.data()));

    std::ostringstream out;
    out << "fs_hz,f_hz,n,std_a_db,std_f_hz,flagged\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        out << fmt(grid[i]) << ',' << fmt(f_eff[i]) << ',' << n_samples[i] << ','
            << fmt(std_a[i]) << ',' << fmt(std_f[i]) << ',' << flagged[i] << '\n';
    }
    return out.str();
}

std::string run_contour(const json& p) {
    const rss_sine_params params = params_from(p);
    const rss_avg_options opts = avg_from(p);
    const std::vector<double> fs_grid = grid_from_json(p["fs_grid"]);
    const std::vector<double> delta_grid = grid_from_json(p["delta_grid"]);

    const size_t cells = fs_grid.size() * delta_grid.size();
    std::vector<double> min_a(cells), min_f(cells);
    std::vector<int> flagged(cells);
    check(rss_sweep_contour(&params, fs_grid.data(), fs_grid.size(), delta_grid.data(),
                            delta_grid.size(), p.value("t_obs_s", 1.0), nyquist_from(p), &opts,
                            min_a.data(), min_f.data(), flagged.data()));

    std::ostringstream out;
    out << "fs_hz,step_db,min_std_a_db,min_std_f_hz,flagged\n";
    for (size_t i = 0; i < fs_grid.size(); ++i) {
        for (size_t j = 0; j < delta_grid.size(); ++j) {
            const size_t idx = i * delta_grid.size() + j;
            out << fmt(fs_grid[i]) << ',' << fmt(delta_grid[j]) << ',' << fmt(min_a[idx]) << ','
                << fmt(min_f[idx]) << ',' << flagged[idx] << '\n';
        }
    }
    return out.str();
}

// --------------------------- mc config file -------------------------------

// Flat key=value config with unit-suffixed keys; unknown keys are rejected.
json validate_mc_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{2, "cannot open config '" + path + "'"};

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw CliError{1, "config line " + std::to_string(line_no) + ": expected key=value"};
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw CliError{1, "config line " + std::to_string(line_no) + ": empty key or value"};
        }
        if (kv.count(key)) throw CliError{1, "duplicate key '" + key + "'"};
        kv[key] = value;
    }

    static const std::map<std::string, std::string> schema = {
        {"trials", "count"},       {"a_db", "number"},     {"f_hz", "number"},
        {"fs_hz", "number"},       {"n", "count"},         {"sigma_grid", "grid"},
        {"step_db", "number"},     {"seed", "count"},      {"method", "method"},
        {"quantizer", "quantizer"},{"threshold_db", "number"},
        {"band_lo_hz", "number"},  {"band_hi_hz", "number"},
    };
    static const std::vector<std::string> required = {"trials", "a_db",    "f_hz",
                                                      "fs_hz",  "n",       "sigma_grid",
                                                      "step_db", "seed",   "method"};

    for (const auto& [key, value] : kv) {
        if (!schema.count(key)) throw CliError{1, "unknown key '" + key + "'"};
    }
    for (const auto& key : required) {
        if (!kv.count(key)) throw CliError{1, "MissingKey(" + key + ")"};
    }

    auto as_number = [&](const std::string& key) {
        double v = 0.0;
        const std::string& s = kv.at(key);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw CliError{1, "key '" + key + "': not a number: '" + s + "'"};
        }
        return v;
    };
    auto as_count = [&](const std::string& key) {
        const double v = as_number(key);
        if (v < 0 || v != std::floor(v)) {
            throw CliError{1, "key '" + key + "': not a non-negative integer"};
        }
        return static_cast<uint64_t>(v);
    };

    json p;
    p["trials"] = as_count("trials");
    p["a_db"] = as_number("a_db");
    p["f_hz"] = as_number("f_hz");
    p["fs_hz"] = as_number("fs_hz");
    p["n"] = as_count("n");
    p["sigma_grid"] = grid_to_json(parse_grid(kv.at("sigma_grid")));
    p["step_db"] = as_number("step_db");
    p["seed"] = as_count("seed");

    const std::string method = kv.at("method");
    if (method != "mle" && method != "periodogram") {
        throw CliError{1, "key 'method': expected mle or periodogram"};
    }
    p["method"] = method;

    if (kv.count("quantizer")) {
        const std::string q = kv.at("quantizer");
        if (q != "one-bit" && q != "uniform") {
            throw CliError{1, "key 'quantizer': expected one-bit or uniform"};
        }
        p["quantizer"] = q;
    } else {
        p["quantizer"] = "one-bit";
    }
    p["threshold_db"] = kv.count("threshold_db") ? as_number("threshold_db") : 0.0;
    p["band_lo_hz"] = kv.count("band_lo_hz") ? as_number("band_lo_hz") : 0.0;
    p["band_hi_hz"] = kv.count("band_hi_hz") ? as_number("band_hi_hz") : 0.0;

    // Domain checks that do not need the numeric core.
    if (!(p["step_db"].get<double>() > 0.0)) throw CliError{1, "DomainError(step_db must be > 0)"};
    if (p["trials"].get<uint64_t>() < 1) throw CliError{1, "DomainError(trials must be >= 1)"};
    for (double s : grid_from_json(p["sigma_grid"])) {
        if (!(s > 0.0)) throw CliError{1, "DomainError(sigma_grid must be positive)"};
    }
    return p;
}

std::string run_mc(const json& p) {
    rss_mc_config cfg{};
    cfg.trials = p["trials"].get<uint64_t>();
    cfg.truth.amplitude_db = p["a_db"].get<double>();
    cfg.truth.frequency_hz = p["f_hz"].get<double>();
    cfg.acq.sample_rate_hz = p["fs_hz"].get<double>();
    cfg.acq.num_samples = p["n"].get<uint64_t>();
    cfg.quantizer_mode =
        p.value("quantizer", std::string("one-bit")) == "uniform" ? RSS_QUANT_UNIFORM
                                                                  : RSS_QUANT_ONE_BIT;
    cfg.step_db = p["step_db"].get<double>();
    cfg.threshold_db = p.value("threshold_db", 0.0);
    cfg.seed = p["seed"].get<uint64_t>();
    cfg.method = p.value("method", std::string("mle")) == "periodogram" ? RSS_METHOD_PERIODOGRAM
                                                                        : RSS_METHOD_MLE;
    cfg.band_lo_hz = p.value("band_lo_hz", 0.0);
    cfg.band_hi_hz = p.value("band_hi_hz", 0.0);
    cfg.threads = p.value("threads", 0);

    const std::vector<double> grid = grid_from_json(p["sigma_grid"]);
    std::vector<rss_mc_row> rows(grid.size());
    check(rss_mc_rmse(&cfg, grid.data(), grid.size(), rows.data()));

    std::ostringstream out;
    out << "sigma_db,rmse_f_hz,rmse_a_db,bias_f_hz,bias_a_db,trials_used,dropouts\n";
    for (const auto& row : rows) {
        out << fmt(row.sigma_db) << ',' << fmt(row.rmse_f_hz) << ',' << fmt(row.rmse_a_db) << ','
            << fmt(row.bias_f_hz) << ',' << fmt(row.bias_a_db) << ',' << row.trials_used << ','
            << row.dropouts << '\n';
    }
    return out.str();
}

// ------------------------------- dispatch ---------------------------------

std::string run_subcommand(const std::string& name, const json& params) {
    if (name == "deltap") return run_deltap(params);
    if (name == "simulate") return run_simulate(params);
    if (name == "quantize") return run_quantize(params);
    if (name == "estimate") return run_estimate(params);
    if (name == "mc") return run_mc(params);
    if (name == "crb") return run_crb(params);
    if (name == "sweep-noise") return run_sweep_noise(params);
    if (name == "sweep-step") return run_sweep_step(params);
    if (name == "sweep-rate") return run_sweep_rate(params);
    if (name == "contour") return run_contour(params);
    throw CliError{1, "unknown subcommand '" + name + "'"};
}

void emit(const std::string& name, const json& params, const std::string& output,
          const std::string& csv, double duration_s) {
    if (output.empty()) {
        std::cout << csv;
        return;
    }
    write_file_atomic(output, csv);

    json manifest;
    manifest["tool"] = "rss-sentry";
    manifest["version"] = rss_version();
    manifest["subcommand"] = name;
    manifest["parameters"] = params;
    manifest["output"] = output;
    manifest["duration_s"] = duration_s;
    write_file_atomic(output + ".manifest.json", manifest.dump(2) + "\n");
}

int execute(const std::string& name, const json& params, const std::string& output) {
    const auto start = std::chrono::steady_clock::now();
    const std::string csv = run_subcommand(name, params);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(name, params, output, csv, duration);
    return 0;
}

int run_rerun(const std::string& manifest_path, std::string output) {
    std::ifstream in(manifest_path);
    if (!in) throw CliError{2, "cannot open manifest '" + manifest_path + "'"};
    json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw CliError{2, std::string("manifest parse error: ") + e.what()};
    }
    if (!manifest.contains("subcommand") || !manifest.contains("parameters")) {
        throw CliError{2, "manifest missing subcommand/parameters"};
    }
    if (output.empty()) {
        output = manifest.value("output", std::string()) + ".rerun.csv";
    }
    return execute(manifest["subcommand"].get<std::string>(), manifest["parameters"], output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rss-sentry: quantized-RSS sinusoid estimation bounds and simulators"};
    app.require_subcommand(1);

    std::string output;
    app.add_option("-o,--output", output, "write CSV here (plus .manifest.json sidecar)");
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (env RSS_SENTRY_THREADS)");

    // deltap
    auto* deltap = app.add_subcommand("deltap", "vibration-induced power change model");
    double beta = 0.5, theta = 0.0, dz = 1e-4, carrier = 915e6, wavelength = 0.0, scene_a = 1.0;
    int theta_count = 181;
    bool expected = false;
    std::string beta_grid_text;
    deltap->add_option("--beta", beta, "relative affected amplitude b/a");
    auto* theta_opt = deltap->add_option("--theta", theta, "relative phase (rad)");
    deltap->add_option("--dz-m", dz, "peak-to-peak displacement (m)")->capture_default_str();
    deltap->add_option("--carrier-hz", carrier, "carrier frequency (Hz)")->capture_default_str();
    auto* wl_opt = deltap->add_option("--wavelength-m", wavelength, "wavelength override (m)");
    deltap->add_option("--a", scene_a, "unaffected phasor amplitude")->capture_default_str();
    deltap->add_flag("--expected", expected, "emit E[|dP|] over uniform theta");
    deltap->add_option("--beta-grid", beta_grid_text, "comma list of beta values (with --expected)");
    deltap->add_option("--theta-count", theta_count, "theta sweep points")->capture_default_str();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "synthesize a received-power trace");
    double sim_a = 0.025, sim_b = 0.0, sim_f = 100.0, sim_phase = 0.0, sim_fs = 400.0,
           sim_sigma = 0.25;
    uint64_t sim_n = 400, sim_seed = 0;
    simulate->add_option("--a-db", sim_a, "sine amplitude (dB)")->capture_default_str();
    simulate->add_option("--b-db", sim_b, "DC offset (dB)")->capture_default_str();
    simulate->add_option("--f-hz", sim_f, "sine frequency (Hz)")->capture_default_str();
    simulate->add_option("--phase-rad", sim_phase, "initial phase")->capture_default_str();
    simulate->add_option("--fs-hz", sim_fs, "sample rate (Hz)")->capture_default_str();
    simulate->add_option("--n", sim_n, "sample count")->capture_default_str();
    simulate->add_option("--sigma", sim_sigma, "noise std (dB)")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();

    // quantize
    auto* quantize = app.add_subcommand("quantize", "quantize a continuous trace");
    std::string q_input, q_format = "csv-rss", q_mode = "one-bit";
    double q_step = 1.0, q_threshold = 0.0;
    quantize->add_option("--input", q_input, "input trace CSV")->required();
    quantize->add_option("--format", q_format, "csv-rss | csv-kv")->capture_default_str();
    quantize->add_option("--mode", q_mode, "one-bit | uniform")->capture_default_str();
    quantize->add_option("--step-db", q_step, "uniform step (dB)")->capture_default_str();
    quantize->add_option("--threshold-db", q_threshold, "one-bit threshold")->capture_default_str();

    // estimate
    auto* estimate = app.add_subcommand("estimate", "fit sine parameters from a trace file");
    std::string e_input, e_format = "csv-rss", e_method = "mle";
    double e_lo = 0.0, e_hi = 0.0, e_sigma = 0.25;
    estimate->add_option("--input", e_input, "input trace CSV")->required();
    estimate->add_option("--format", e_format, "csv-rss | csv-kv")->capture_default_str();
    estimate->add_option("--band-lo-hz", e_lo, "search band low edge")->capture_default_str();
    estimate->add_option("--band-hi-hz", e_hi, "search band high edge (0 = fs/2)")
        ->capture_default_str();
    estimate->add_option("--sigma", e_sigma, "assumed noise std (dB)")->capture_default_str();
    estimate->add_option("--method", e_method, "mle | periodogram")->capture_default_str();

    // mc
    auto* mc = app.add_subcommand("mc", "Monte-Carlo RMSE curve from a key=value config");
    std::string mc_config;
    mc->add_option("--config", mc_config, "key=value config file")->required();

    // shared bound-op options
    const auto add_bound_common = [&](CLI::App* cmd, double* a_db, double* f_hz, double* fs_hz,
                                      uint64_t* n, int* phases, int* offsets,
                                      std::string* avg_mode) {
        cmd->add_option("--a-db", *a_db, "sine amplitude (dB)")->capture_default_str();
        cmd->add_option("--f-hz", *f_hz, "sine frequency (Hz)")->capture_default_str();
        if (fs_hz) cmd->add_option("--fs-hz", *fs_hz, "sample rate (Hz)")->capture_default_str();
        if (n) cmd->add_option("--n", *n, "sample count")->capture_default_str();
        cmd->add_option("--grid-phases", *phases, "phase grid points")->capture_default_str();
        cmd->add_option("--grid-offsets", *offsets, "DC offset grid points")->capture_default_str();
        cmd->add_option("--avg-mode", *avg_mode, "crb | fim averaging")->capture_default_str();
    };

    // crb
    auto* crb = app.add_subcommand("crb", "averaged Cramer-Rao bound at one operating point");
    double c_a = 0.025, c_f = 100.0, c_fs = 400.0, c_sigma = 0.25, c_step = 1.0, c_b = 0.0,
           c_phase = 0.0;
    uint64_t c_n = 400;
    int c_phases = 32, c_offsets = 33;
    std::string c_avg = "crb";
    bool c_point = false, c_unquantized = false;
    add_bound_common(crb, &c_a, &c_f, &c_fs, &c_n, &c_phases, &c_offsets, &c_avg);
    crb->add_option("--sigma", c_sigma, "noise std (dB)")->capture_default_str();
    crb->add_option("--step-db", c_step, "quantizer step (dB)")->capture_default_str();
    crb->add_option("--b-db", c_b, "DC offset (point mode)")->capture_default_str();
    crb->add_option("--phase-rad", c_phase, "phase (point mode)")->capture_default_str();
    crb->add_flag("--point", c_point, "single-point CRB, no averaging");
    crb->add_flag("--unquantized", c_unquantized, "closed-form unquantized reference");

    // sweep-noise
    auto* sweep_noise_cmd = app.add_subcommand("sweep-noise", "averaged bound vs noise std");
    double sn_a = 0.025, sn_f = 100.0, sn_fs = 400.0, sn_step = 1.0;
    uint64_t sn_n = 400;
    int sn_phases = 32, sn_offsets = 33, sn_count = 60;
    std::string sn_avg = "crb", sn_grid_text;
    add_bound_common(sweep_noise_cmd, &sn_a, &sn_f, &sn_fs, &sn_n, &sn_phases, &sn_offsets,
                     &sn_avg);
    sweep_noise_cmd->add_option("--step-db", sn_step, "quantizer step (dB)")->capture_default_str();
    sweep_noise_cmd->add_option("--sigma-grid", sn_grid_text, "comma list (default log grid)");
    sweep_noise_cmd->add_option("--sigma-count", sn_count, "points in the default grid")
        ->capture_default_str();

    // sweep-step
    auto* sweep_step_cmd = app.add_subcommand("sweep-step", "min-over-sigma bound vs step size");
    double ss_a = 0.025, ss_f = 100.0, ss_fs = 400.0;
    uint64_t ss_n = 400;
    int ss_phases = 32, ss_offsets = 33;
    std::string ss_avg = "crb", ss_grid_text = "0.25,0.5,0.75,1,1.5,2,3,4";
    add_bound_common(sweep_step_cmd, &ss_a, &ss_f, &ss_fs, &ss_n, &ss_phases, &ss_offsets,
                     &ss_avg);
    sweep_step_cmd->add_option("--delta-grid", ss_grid_text, "comma list of step sizes (dB)")
        ->capture_default_str();

    // sweep-rate
    auto* sweep_rate_cmd = app.add_subcommand("sweep-rate", "bound vs sampling rate at fixed sigma");
    double sr_a = 0.025, sr_f = 100.0, sr_sigma = 0.25, sr_step = 1.0, sr_tobs = 1.0;
    int sr_phases = 32, sr_offsets = 33;
    std::string sr_avg = "crb", sr_grid_text = "16,64,128,256,400", sr_nyquist = "reject";
    add_bound_common(sweep_rate_cmd, &sr_a, &sr_f, nullptr, nullptr, &sr_phases, &sr_offsets,
                     &sr_avg);
    sweep_rate_cmd->add_option("--sigma", sr_sigma, "noise std (dB)")->capture_default_str();
    sweep_rate_cmd->add_option("--step-db", sr_step, "quantizer step (dB)")->capture_default_str();
    sweep_rate_cmd->add_option("--fs-grid", sr_grid_text, "comma list of rates (Hz)")
        ->capture_default_str();
    sweep_rate_cmd->add_option("--t-obs", sr_tobs, "observation time (s), N = fs * t_obs")
        ->capture_default_str();
    sweep_rate_cmd->add_option("--nyquist", sr_nyquist, "reject | scale sub-Nyquist policy")
        ->capture_default_str();

    // contour
    auto* contour_cmd = app.add_subcommand("contour", "min-over-sigma bounds vs (fs, step)");
    double ct_a = 0.025, ct_f = 100.0, ct_tobs = 1.0;
    int ct_phases = 32, ct_offsets = 33;
    std::string ct_avg = "crb", ct_fs_text = "50,100,200,400", ct_delta_text = "0.25,0.5,1,2,4",
                ct_nyquist = "scale";
    add_bound_common(contour_cmd, &ct_a, &ct_f, nullptr, nullptr, &ct_phases, &ct_offsets,
                     &ct_avg);
    contour_cmd->add_option("--fs-grid", ct_fs_text, "comma list of rates (Hz)")
        ->capture_default_str();
    contour_cmd->add_option("--delta-grid", ct_delta_text, "comma list of steps (dB)")
        ->capture_default_str();
    contour_cmd->add_option("--t-obs", ct_tobs, "observation time (s)")->capture_default_str();
    contour_cmd->add_option("--nyquist", ct_nyquist, "reject | scale")->capture_default_str();

    // rerun
    auto* rerun = app.add_subcommand("rerun", "re-execute a command from its manifest");
    std::string manifest_path;
    rerun->add_option("manifest", manifest_path, "path to .manifest.json")->required();

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (rerun->parsed()) return run_rerun(manifest_path, output);

        json p;
        std::string name;
        if (deltap->parsed()) {
            name = "deltap";
            p["a"] = scene_a;
            p["dz_m"] = dz;
            if (wl_opt->count()) {
                p["wavelength_m"] = wavelength;
            } else {
                p["carrier_hz"] = carrier;
            }
            p["expected"] = expected;
            if (!beta_grid_text.empty()) {
                p["beta_grid"] = grid_to_json(parse_grid(beta_grid_text));
            } else {
                p["beta"] = beta;
            }
            if (theta_opt->count()) {
                p["theta_rad"] = theta;
            } else {
                p["theta_count"] = theta_count;
            }
        } else if (simulate->parsed()) {
            name = "simulate";
            p["a_db"] = sim_a;
            p["b_db"] = sim_b;
            p["f_hz"] = sim_f;
            p["phase_rad"] = sim_phase;
            p["fs_hz"] = sim_fs;
            p["n"] = sim_n;
            p["sigma_db"] = sim_sigma;
            p["seed"] = sim_seed;
        } else if (quantize->parsed()) {
            name = "quantize";
            p["input"] = q_input;
            p["format"] = q_format;
            p["mode"] = q_mode;
            p["step_db"] = q_step;
            p["threshold_db"] = q_threshold;
        } else if (estimate->parsed()) {
            name = "estimate";
            p["input"] = e_input;
            p["format"] = e_format;
            p["band_lo_hz"] = e_lo;
            p["band_hi_hz"] = e_hi;
            p["sigma_db"] = e_sigma;
            p["method"] = e_method;
        } else if (mc->parsed()) {
            name = "mc";
            p = validate_mc_config(mc_config);
            if (threads > 0) p["threads"] = threads;
        } else if (crb->parsed()) {
            name = "crb";
            p["a_db"] = c_a;
            p["b_db"] = c_b;
            p["phase_rad"] = c_phase;
            p["f_hz"] = c_f;
            p["fs_hz"] = c_fs;
            p["n"] = c_n;
            p["sigma_db"] = c_sigma;
            p["step_db"] = c_step;
            p["point"] = c_point;
            p["unquantized"] = c_unquantized;
            p["grid_phases"] = c_phases;
            p["grid_offsets"] = c_offsets;
            p["avg_mode"] = c_avg;
        } else if (sweep_noise_cmd->parsed()) {
            name = "sweep-noise";
            p["a_db"] = sn_a;
            p["f_hz"] = sn_f;
            p["fs_hz"] = sn_fs;
            p["n"] = sn_n;
            p["step_db"] = sn_step;
            p["sigma_grid"] = grid_to_json(!sn_grid_text.empty()
                                               ? parse_grid(sn_grid_text)
                                               : log_grid(sn_step / 100.0, 3.0 * sn_step,
                                                          sn_count));
            p["grid_phases"] = sn_phases;
            p["grid_offsets"] = sn_offsets;
            p["avg_mode"] = sn_avg;
        } else if (sweep_step_cmd->parsed()) {
            name = "sweep-step";
            p["a_db"] = ss_a;
            p["f_hz"] = ss_f;
            p["fs_hz"] = ss_fs;
            p["n"] = ss_n;
            p["delta_grid"] = grid_to_json(parse_grid(ss_grid_text));
            p["grid_phases"] = ss_phases;
            p["grid_offsets"] = ss_offsets;
            p["avg_mode"] = ss_avg;
        } else if (sweep_rate_cmd->parsed()) {
            name = "sweep-rate";
            p["a_db"] = sr_a;
            p["f_hz"] = sr_f;
            p["sigma_db"] = sr_sigma;
            p["step_db"] = sr_step;
            p["fs_grid"] = grid_to_json(parse_grid(sr_grid_text));
            p["t_obs_s"] = sr_tobs;
            p["nyquist"] = sr_nyquist;
            p["grid_phases"] = sr_phases;
            p["grid_offsets"] = sr_offsets;
            p["avg_mode"] = sr_avg;
        } else if (contour_cmd->parsed()) {
            name = "contour";
            p["a_db"] = ct_a;
            p["f_hz"] = ct_f;
            p["fs_grid"] = grid_to_json(parse_grid(ct_fs_text));
            p["delta_grid"] = grid_to_json(parse_grid(ct_delta_text));
            p["t_obs_s"] = ct_tobs;
            p["nyquist"] = ct_nyquist;
            p["grid_phases"] = ct_phases;
            p["grid_offsets"] = ct_offsets;
            p["avg_mode"] = ct_avg;
        } else {
            throw CliError{1, "no subcommand given"};
        }

        if (threads > 0 && !p.contains("threads")) p["threads"] = threads;
        return execute(name, p, output);
    } catch (const CliError& e) {
        std::cerr << "rss-sentry: error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "rss-sentry: error: " << e.what() << "\n";
        return 3;
    }
}
