#include "npe/series.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "npe/errors.hpp"

namespace npe {

namespace {

// Flattened view of a record in column order.
std::vector<double> record_values(const DiagnosticsRecord& r) {
    std::vector<double> v;
    v.reserve(28);
    v.push_back(r.time);
    for (double x : r.lp_rho) v.push_back(x);
    for (double x : r.lp_sigma_fluct) v.push_back(x);
    v.push_back(r.grad_phi_sup);
    for (double x : r.hs_rho) v.push_back(x);
    for (double x : r.hs_sigma) v.push_back(x);
    for (double x : r.lr_omega) v.push_back(x);
    for (double x : r.hs_u) v.push_back(x);
    v.push_back(r.min_c1);
    v.push_back(r.min_c2);
    v.push_back(r.mean_rho);
    v.push_back(r.mean_sigma);
    v.push_back(r.energy_l2);
    v.push_back(r.dissipation);
    return v;
}

void record_from_values(DiagnosticsRecord& r, const std::vector<double>& v) {
    size_t i = 0;
    r.time = v[i++];
    for (double& x : r.lp_rho) x = v[i++];
    for (double& x : r.lp_sigma_fluct) x = v[i++];
    r.grad_phi_sup = v[i++];
    for (double& x : r.hs_rho) x = v[i++];
    for (double& x : r.hs_sigma) x = v[i++];
    for (double& x : r.lr_omega) x = v[i++];
    for (double& x : r.hs_u) x = v[i++];
    r.min_c1 = v[i++];
    r.min_c2 = v[i++];
    r.mean_rho = v[i++];
    r.mean_sigma = v[i++];
    r.energy_l2 = v[i++];
    r.dissipation = v[i++];
}

constexpr size_t n_columns = 28;

} // namespace

std::string series_header() {
    return "time,"
           "rho_l2,rho_l3,rho_l4,rho_linf,"
           "sigma_fluct_l2,sigma_fluct_l3,sigma_fluct_l4,sigma_fluct_linf,"
           "grad_phi_sup,"
           "rho_h1,rho_h2,rho_h3,"
           "sigma_h1,sigma_h2,sigma_h3,"
           "omega_l2,omega_l4,omega_linf,"
           "u_h1,u_h2,u_h3,"
           "min_c1,min_c2,"
           "mean_rho,mean_sigma,"
           "energy_l2,dissipation";
}

std::string series_row(const DiagnosticsRecord& r) {
    const auto values = record_values(r);
    std::string out;
    char buf[32];
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
        out += buf;
    }
    return out;
}

DiagnosticsRecord parse_series_row(const std::string& line) {
    std::vector<double> values;
    values.reserve(n_columns);
    std::istringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) {
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc())
            throw IoError("series row has a non-numeric field: " + item);
        values.push_back(v);
    }
    if (values.size() != n_columns)
        throw IoError("series row has " + std::to_string(values.size()) + " fields, expected " +
                      std::to_string(n_columns));
    DiagnosticsRecord r;
    record_from_values(r, values);
    return r;
}

namespace {

void ensure_parent_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

} // namespace

void append_series_row(const DiagnosticsRecord& r, const std::string& path) {
    ensure_parent_dir(path);
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open series file " + path);
    if (fresh) out << series_header() << "\n";
    out << series_row(r) << "\n";
    if (!out) throw IoError("write failed on series file " + path);
}

std::vector<DiagnosticsRecord> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series file " + path);
    std::vector<DiagnosticsRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != series_header())
                throw IoError("series file " + path + " has an unexpected header");
            continue;
        }
        records.push_back(parse_series_row(line));
    }
    return records;
}

SeriesWriter::SeriesWriter(const std::string& path) : path_(path) {
    ensure_parent_dir(path);
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_.open(path, std::ios::app);
    if (!out_) throw IoError("cannot open series file " + path);
    if (fresh) out_ << series_header() << "\n";
}

void SeriesWriter::append(const DiagnosticsRecord& r) {
    out_ << series_row(r) << "\n";
    out_.flush();
    if (!out_) throw IoError("write failed on series file " + path_);
}

} // namespace npe
