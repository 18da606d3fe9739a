// Batch front end: estimate densities on a grid, compare two methods, or time
// them across a grid-size sweep.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kdefft/kdefft.hpp"

namespace {

using namespace kdefft;

struct CommonOpts {
    std::string input;
    std::string delimiter = ",";
    std::size_t synthetic = 0;
    unsigned long long seed = 12345;
    std::string bandwidth_inline;
    std::string bandwidth_file;
    bool bandwidth_rule = false;
    std::string grid = "64";
    double tau = 3.7;
    std::string extension;
    bool full_support = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--input,input", o.input, "delimited sample file (rows = points)");
    cmd->add_option("--delimiter", o.delimiter, "sample file delimiter (default ,)");
    cmd->add_option("--synthetic", o.synthetic, "generate a 2D bimodal sample of this size instead of reading a file");
    cmd->add_option("--seed", o.seed, "seed for synthetic-data generation");
    cmd->add_option("--bandwidth", o.bandwidth_inline, "inline bandwidth matrix, rows separated by ';'");
    cmd->add_option("--bandwidth-file", o.bandwidth_file, "bandwidth matrix file, one row per line");
    cmd->add_flag("--bandwidth-rule", o.bandwidth_rule, "normal-scale rule bandwidth from the sample covariance");
    cmd->add_option("--grid", o.grid, "grid sizes per dimension, e.g. 64,64 (single value broadcasts)");
    cmd->add_option("--tau", o.tau, "effective-support factor (default 3.7)");
    cmd->add_option("--extension", o.extension, "per-dimension grid extension override, e.g. 1.5,1.5");
    cmd->add_flag("--full-support", o.full_support, "disable effective-support truncation (L_k = M_k - 1)");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : detail::split_loose(text)) {
        if (auto v = detail::parse_double(tok)) out.push_back(*v);
        else throw ConfigError("bad " + what + " value '" + tok + "'");
    }
    if (out.empty()) throw ConfigError("empty " + what + " list");
    return out;
}

SampleMatrix synthetic_bimodal(std::size_t n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.5);
    std::bernoulli_distribution pick(0.5);
    SampleMatrix m;
    m.n = n;
    m.dim = 2;
    m.points.resize(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = pick(rng) ? 1.5 : -1.5;
        m.points[i * 2] = cx + nd(rng);
        m.points[i * 2 + 1] = (cx > 0 ? 1.0 : -1.0) + nd(rng);
    }
    return m;
}

SampleMatrix get_data(const CommonOpts& o) {
    if (o.delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
    if (!o.input.empty()) return load_samples(o.input, o.delimiter[0]);
    if (o.synthetic > 0) return synthetic_bimodal(o.synthetic, o.seed);
    throw ConfigError("either --input or --synthetic is required");
}

BandwidthMatrix get_bandwidth(const CommonOpts& o, const SampleMatrix& data) {
    const int given = (!o.bandwidth_inline.empty()) + (!o.bandwidth_file.empty()) + o.bandwidth_rule;
    if (given > 1) throw ConfigError("choose one of --bandwidth, --bandwidth-file, --bandwidth-rule");
    if (!o.bandwidth_inline.empty()) return parse_bandwidth(o.bandwidth_inline);
    if (!o.bandwidth_file.empty()) return load_bandwidth_file(o.bandwidth_file);
    return rule_of_thumb_bandwidth(data);
}

std::vector<std::size_t> parse_grid_sizes(const std::string& text, int dim) {
    std::vector<std::size_t> sizes;
    for (double v : parse_number_list(text, "grid size")) {
        if (v < 2 || v != std::floor(v)) throw BadGridSize("grid sizes must be integers >= 2");
        sizes.push_back(static_cast<std::size_t>(v));
    }
    if (sizes.size() == 1) sizes.assign(dim, sizes[0]);
    if (static_cast<int>(sizes.size()) != dim)
        throw BadGridSize("grid size list does not match the sample dimension");
    return sizes;
}

struct Prepared {
    GridSpec grid;
    GridCounts counts;
    KernelWeights kw;
};

Prepared prepare(const CommonOpts& o, const SampleMatrix& data, const BandwidthMatrix& h) {
    Prepared p;
    const auto sizes = parse_grid_sizes(o.grid, data.dim);
    std::vector<double> ext;
    if (!o.extension.empty()) {
        ext = parse_number_list(o.extension, "extension");
        if (ext.size() == 1) ext.assign(data.dim, ext[0]);
        if (static_cast<int>(ext.size()) != data.dim)
            throw ConfigError("extension list does not match the sample dimension");
    } else {
        ext = default_extension(h, o.tau);
    }
    p.grid = make_grid(data, sizes, ext);
    p.counts = linear_binning(data, p.grid);
    std::vector<int> support;
    if (o.full_support) {
        for (auto m : p.grid.sizes) support.push_back(static_cast<int>(m) - 1);
    } else {
        support = effective_support(h, p.grid, o.tau);
    }
    p.kw = kernel_weights(p.grid, h, support, data.n);
    return p;
}

DensityGrid run_method(Method method, const Prepared& p, const SampleMatrix& data,
                       const BandwidthMatrix& h) {
    switch (method) {
        case Method::naive: {
            SampleMatrix nodes;
            nodes.dim = p.grid.dim;
            nodes.n = p.counts.values.size();
            nodes.points.resize(nodes.n * nodes.dim);
            std::vector<std::size_t> idx(p.grid.dim, 0);
            std::size_t flat = 0;
            do {
                for (int k = 0; k < p.grid.dim; ++k)
                    nodes.points[flat * p.grid.dim + k] = p.grid.node(k, idx[k]);
                ++flat;
            } while (NdArray<double>::next_index(idx, p.grid.sizes));
            auto vals = naive_kde(data, h, nodes);
            DensityGrid dg;
            dg.grid = p.grid;
            dg.method = Method::naive;
            dg.values = NdArray<double>(p.grid.sizes);
            for (std::size_t i = 0; i < vals.size(); ++i) dg.values[i] = vals[i];
            return dg;
        }
        case Method::binned_direct:
            return binned_kde_direct(p.grid, p.counts, p.kw);
        default:
            return binned_kde_fft(p.grid, p.counts, p.kw, method);
    }
}

void write_output(const DensityGrid& dg, const std::string& format, const std::string& output,
                  double tau, const std::vector<int>& support) {
    std::string path = output;
    if (path.empty()) path = std::string("density.") + (format == "csv" ? "csv" : "json");
    if (format == "csv") write_density_csv(path, dg);
    else write_density_json(path, dg, tau, support);
    std::cout << "wrote " << path << " (" << method_name(dg.method) << ", "
              << dg.values.size() << " nodes)\n";
}

double max_abs(const NdArray<double>& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

int run(int argc, char** argv) {
    CLI::App app{"binned kernel density estimation with FFT convolution"};
    app.require_subcommand(1);

    CommonOpts eo, co, bo;
    std::string est_method = "fft-corrected";
    std::string est_format = "json";
    std::string est_output;
    auto* est = app.add_subcommand("estimate", "estimate a density grid");
    add_common(est, eo);
    est->add_option("--method", est_method, "naive | binned-direct | fft-wand | fft-corrected");
    est->add_option("--format", est_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    est->add_option("--output", est_output, "output path");

    std::string cmp_methods = "fft-corrected,binned-direct";
    auto* cmp = app.add_subcommand("compare", "run two methods and report their discrepancy");
    add_common(cmp, co);
    cmp->add_option("--methods", cmp_methods, "two comma-separated method names");

    std::string bench_methods = "binned-direct,fft-corrected";
    std::string bench_sweep = "32,64,128";
    auto* ben = app.add_subcommand("bench", "wall time per method across a grid-size sweep");
    add_common(ben, bo);
    ben->add_option("--methods", bench_methods, "comma-separated method names");
    ben->add_option("--sweep", bench_sweep, "per-dimension grid sizes to sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (est->parsed()) {
        const Method method = parse_method(est_method);
        auto data = get_data(eo);
        auto h = get_bandwidth(eo, data);
        auto p = prepare(eo, data, h);
        auto dg = run_method(method, p, data, h);
        write_output(dg, est_format, est_output, eo.tau, p.kw.support);
        return 0;
    }

    if (cmp->parsed()) {
        std::vector<std::string> names;
        for (const auto& t : detail::split(cmp_methods, ',')) names.push_back(detail::trim(t));
        if (names.size() != 2) throw ConfigError("--methods needs exactly two method names");
        auto data = get_data(co);
        auto h = get_bandwidth(co, data);
        auto p = prepare(co, data, h);
        auto a = run_method(parse_method(names[0]), p, data, h);
        auto b = run_method(parse_method(names[1]), p, data, h);
        double maxdiff = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
            maxdiff = std::max(maxdiff, std::abs(a.values[i] - b.values[i]));
        const double scale = std::max(max_abs(b.values), 1e-300);
        std::printf("%s vs %s: max-abs %.6e, relative-max %.6e\n", names[0].c_str(),
                    names[1].c_str(), maxdiff, maxdiff / scale);
        return 0;
    }

    // bench
    std::vector<Method> methods;
    for (const auto& t : detail::split(bench_methods, ','))
        methods.push_back(parse_method(detail::trim(t)));
    auto data = get_data(bo);
    auto h = get_bandwidth(bo, data);
    std::printf("%8s %16s %12s\n", "M", "method", "seconds");
    for (double mv : parse_number_list(bench_sweep, "sweep")) {
        if (mv < 2 || mv != std::floor(mv)) throw BadGridSize("sweep sizes must be integers >= 2");
        CommonOpts o = bo;
        o.grid = std::to_string(static_cast<std::size_t>(mv));
        auto p = prepare(o, data, h);
        for (Method m : methods) {
            const auto t0 = std::chrono::steady_clock::now();
            auto dg = run_method(m, p, data, h);
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            std::printf("%8zu %16s %12.4f\n", static_cast<std::size_t>(mv), method_name(m),
                        dt.count());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
