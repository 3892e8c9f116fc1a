#pragma once

// Seeded instance generation, the portfolio experiment grid over (k, b), and
// CSV / SVG reporting of (nominal value, worst case) per method.

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "persp/core.hpp"
#include "persp/robust.hpp"

namespace persp {

// ---------------------------------------------------------------------------
// Random numbers

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna) with its state filled by splitmix64.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;
    static constexpr const char* kName = "xoshiro256** (splitmix64-seeded)";

    explicit Xoshiro256(std::uint64_t seed) noexcept {
        for (auto& word : s_) word = splitmix64(seed);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

inline constexpr double kMinScaling = 1e-6;

/// a~_i, d_i ~ U[0,1] i.i.d.; d_i below kMinScaling is redrawn.
inline RobustInstance generate_instance(std::size_t n, std::size_t k, double b, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Vector a(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform();
        do {
            d[i] = rng.uniform();
        } while (d[i] < kMinScaling);
    }
    return RobustInstance(std::move(a), std::move(d), b, k);
}

/// Seed of instance `instance` in grid cell (k_index, b_index).
inline std::uint64_t derive_seed(std::uint64_t base, std::size_t k_index, std::size_t b_index,
                                 std::size_t instance) noexcept {
    std::uint64_t state = base ^ ((static_cast<std::uint64_t>(k_index) << 48) ^
                                  (static_cast<std::uint64_t>(b_index) << 32) ^ static_cast<std::uint64_t>(instance));
    return splitmix64(state);
}

// ---------------------------------------------------------------------------
// Experiment

struct ExperimentConfig {
    std::size_t n = 200;
    std::vector<std::size_t> k_list{5, 10, 20};
    std::vector<double> b_list{5.0, 10.0, 20.0};
    std::size_t instances_per_cell = 10;
    std::uint64_t seed = 20231015;
    std::vector<Method> methods{Method::Budgeted, Method::Ellipsoidal, Method::Perspective};
    SolveOptions solve{};

    void validate() const {
        if (n == 0 || instances_per_cell == 0) throw DomainError("ExperimentConfig: n and instances must be positive");
        if (k_list.empty() || b_list.empty()) throw DomainError("ExperimentConfig: empty k or b list");
        if (methods.empty()) throw DomainError("ExperimentConfig: empty method list");
        for (auto k : k_list)
            if (k < 1 || k > n) throw DomainError("ExperimentConfig: k outside [1, n]");
        for (auto b : b_list)
            if (!(b > 0.0)) throw DomainError("ExperimentConfig: b must be positive");
    }
};

struct ExperimentRecord {
    std::size_t k = 0;
    double b = 0.0;
    std::size_t instance = 0;
    Method method = Method::Nominal;
    double nominal_value = 0.0;
    double worst_case = 0.0;
    double solve_time = 0.0;
    std::size_t iterations = 0;
    /// Set when the solve failed; the values are then meaningless.
    std::optional<std::string> error;

    std::string cell() const;
};

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline std::string ExperimentRecord::cell() const { return "k" + std::to_string(k) + "_b" + format_double(b); }

/// Solves every configured method on every instance of every (k, b) cell.
/// Records are ordered by (k, b, instance, method) as listed in the config.
/// Solver failures are recorded per record and do not stop the grid.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRecord> records;
    records.reserve(cfg.k_list.size() * cfg.b_list.size() * cfg.instances_per_cell * cfg.methods.size());
    for (std::size_t ki = 0; ki < cfg.k_list.size(); ++ki) {
        for (std::size_t bi = 0; bi < cfg.b_list.size(); ++bi) {
            for (std::size_t inst_idx = 0; inst_idx < cfg.instances_per_cell; ++inst_idx) {
                const auto inst = generate_instance(cfg.n, cfg.k_list[ki], cfg.b_list[bi],
                                                    derive_seed(cfg.seed, ki, bi, inst_idx));
                for (Method m : cfg.methods) {
                    ExperimentRecord rec;
                    rec.k = cfg.k_list[ki];
                    rec.b = cfg.b_list[bi];
                    rec.instance = inst_idx;
                    rec.method = m;
                    const auto start = std::chrono::steady_clock::now();
                    try {
                        const auto res = solve_counterpart(m, inst, cfg.solve);
                        rec.nominal_value = nominal_value(res.y_star.y(), inst);
                        rec.worst_case = worst_case(res.y_star.y(), inst);
                        rec.iterations = res.iterations;
                    } catch (const Error& e) {
                        rec.error = e.what();
                    }
                    rec.solve_time =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Reports

class IoError : public Error {
public:
    IoError(const std::string& what, std::filesystem::path path) : Error(what + ": " + path.string()), path_(std::move(path)) {}
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

inline constexpr const char* kCsvHeader = "cell,k,b,instance,method,nominal,worst_case,time_s";

/// One line per record. With include_timing = false the time_s column is
/// left empty so that repeated runs produce identical bytes. Failed records
/// carry empty value columns.
inline std::string records_to_csv(const std::vector<ExperimentRecord>& records, bool include_timing = true) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.cell() << ',' << r.k << ',' << format_double(r.b) << ',' << r.instance << ',' << to_string(r.method)
           << ',';
        if (!r.error) os << format_double(r.nominal_value) << ',' << format_double(r.worst_case);
        else os << ',';
        os << ',';
        if (include_timing) os << format_double(r.solve_time);
        os << '\n';
    }
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DomainError(std::string("records_from_csv: bad ") + what + " '" + s + "'");
    return v;
}

}  // namespace detail

inline std::vector<ExperimentRecord> records_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw DomainError("records_from_csv: missing header");
    std::vector<ExperimentRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 8) throw DomainError("records_from_csv: expected 8 fields in '" + line + "'");
        ExperimentRecord r;
        r.k = detail::parse_number<std::size_t>(f[1], "k");
        r.b = detail::parse_number<double>(f[2], "b");
        r.instance = detail::parse_number<std::size_t>(f[3], "instance");
        const auto m = parse_method(f[4]);
        if (!m) throw DomainError("records_from_csv: unknown method '" + f[4] + "'");
        r.method = *m;
        if (f[5].empty()) {
            r.error = "solver failure";
        } else {
            r.nominal_value = detail::parse_number<double>(f[5], "nominal");
            r.worst_case = detail::parse_number<double>(f[6], "worst_case");
        }
        if (!f[7].empty()) r.solve_time = detail::parse_number<double>(f[7], "time_s");
        if (f[0] != r.cell()) throw DomainError("records_from_csv: cell label mismatch in '" + line + "'");
        out.push_back(std::move(r));
    }
    return out;
}

/// Scatter of nominal value (x axis) against worst case (y axis) for one
/// cell. Each successful record becomes one element of class "marker <method>".
inline std::string cell_svg(const std::vector<ExperimentRecord>& records, std::size_t k, double b) {
    std::vector<const ExperimentRecord*> pts;
    for (const auto& r : records)
        if (r.k == k && r.b == b && !r.error) pts.push_back(&r);
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const auto* r : pts) {
        xmin = std::min(xmin, r->nominal_value);
        xmax = std::max(xmax, r->nominal_value);
        ymin = std::min(ymin, r->worst_case);
        ymax = std::max(ymax, r->worst_case);
    }
    if (pts.empty()) xmin = ymin = 0.0, xmax = ymax = 1.0;
    if (xmax - xmin <= 0.0) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin <= 0.0) ymin -= 0.5, ymax += 0.5;
    constexpr double W = 400, H = 400, M = 50;
    auto px = [&](double v) { return M + (v - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto py = [&](double v) { return H - M - (v - ymin) / (ymax - ymin) * (H - 2 * M); };

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<style>.budgeted{fill:#d62728}.ellipsoidal{fill:#1f77b4}.perspective{fill:none;stroke:#d62728;"
          "stroke-width:1.5}.nominal{fill:#7f7f7f}</style>\n";
    os << "<g id=\"cell-k" << k << "-b" << format_double(b) << "\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">k=" << k << ", b=" << format_double(b)
       << "</text>\n";
    os << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">nominal</text>\n";
    os << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
       << ")\" text-anchor=\"middle\">worst case</text>\n";
    for (const auto* r : pts) {
        const double x = px(r->nominal_value), y = py(r->worst_case);
        const char* cls = to_string(r->method);
        switch (r->method) {
            case Method::Budgeted:
                os << "<polygon class=\"marker " << cls << "\" points=\"" << x << ',' << y - 5 << ' ' << x - 4.5 << ','
                   << y + 4 << ' ' << x + 4.5 << ',' << y + 4 << "\"/>\n";
                break;
            case Method::Ellipsoidal:
                os << "<polygon class=\"marker " << cls << "\" points=\"" << x << ',' << y - 5 << ' ' << x + 5 << ','
                   << y << ' ' << x << ',' << y + 5 << ' ' << x - 5 << ',' << y << "\"/>\n";
                break;
            default:
                os << "<circle class=\"marker " << cls << "\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\"/>\n";
                break;
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

enum class ReportFormat { Csv, SvgScatter };

struct ReportOptions {
    bool include_timing = true;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path);
    out << text;
    if (!out) throw IoError("write failed", path);
}

/// Writes results.csv, or one fig_k<k>_b<b>.svg per cell, into out_dir.
/// Returns the paths written.
inline std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentRecord>& records,
                                                      ReportFormat format, const std::filesystem::path& out_dir,
                                                      const ReportOptions& opts = {}) {
    if (records.empty()) throw DomainError("emit_report: no records");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory", out_dir);
    std::vector<std::filesystem::path> written;
    if (format == ReportFormat::Csv) {
        auto path = out_dir / "results.csv";
        write_text_file(path, records_to_csv(records, opts.include_timing));
        written.push_back(std::move(path));
        return written;
    }
    std::vector<std::pair<std::size_t, double>> cells;
    for (const auto& r : records)
        if (std::find(cells.begin(), cells.end(), std::make_pair(r.k, r.b)) == cells.end()) cells.emplace_back(r.k, r.b);
    for (const auto& [k, b] : cells) {
        auto path = out_dir / ("fig_k" + std::to_string(k) + "_b" + format_double(b) + ".svg");
        write_text_file(path, cell_svg(records, k, b));
        written.push_back(std::move(path));
    }
    return written;
}

}  // namespace persp
