#pragma once

// File formats.
//
// Field CSV:      header "k,re,im", one row per mode, k ascending -K..K.
// Trajectory CSV: header "t,I1,I2,I3,h1_norm[,hs_norm_<s>...],damping_integral".
// Control CSV:    header "t,k,re,im", blocks of ascending k per sample time.
//
// All numbers are written with %.17g (value-preserving round trip); writes
// go through a temporary file renamed into place.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "control.hpp"

namespace kdvbbm {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("cannot parse " + what + " from '" + s + "'");
    }
}

} // namespace detail

inline void write_field_csv(const std::filesystem::path& path, const SpectralField& u) {
    std::string out = "k,re,im\n";
    for (int k = -u.order(); k <= u.order(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += detail::fmt_double(u(k).real());
        out += ',';
        out += detail::fmt_double(u(k).imag());
        out += '\n';
    }
    detail::atomic_write(path, out);
}

inline SpectralField read_field_csv(const std::filesystem::path& path,
                                    double hermitian_tol = 1e-12) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || detail::split_csv_line(line) != std::vector<std::string>{"k", "re", "im"})
        throw IoError(path.string() + ": expected header 'k,re,im'");
    std::vector<complexd> coeffs;
    std::vector<long long> ks;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != 3) throw IoError(path.string() + ": malformed row '" + line + "'");
        ks.push_back(static_cast<long long>(detail::parse_double(cells[0], "mode number")));
        coeffs.emplace_back(detail::parse_double(cells[1], "re"),
                            detail::parse_double(cells[2], "im"));
    }
    if (ks.empty() || ks.size() % 2 == 0)
        throw IoError(path.string() + ": expected an odd number of modes -K..K");
    const int K = static_cast<int>((ks.size() - 1) / 2);
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] != static_cast<long long>(i) - K)
            throw IoError(path.string() + ": modes must be ascending -K..K without gaps");
    SpectralField u(K);
    for (int k = -K; k <= K; ++k) u(k) = coeffs[static_cast<std::size_t>(k + K)];
    if (!u.is_hermitian(hermitian_tol))
        throw IoError(path.string() + ": coefficients violate Hermitian symmetry (non-real field)");
    return u;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::string out = "t,I1,I2,I3,h1_norm";
    for (std::size_t j = 0; j < traj.sobolev_orders.size(); ++j) {
        if (traj.sobolev_orders[j] == 1.0 && j == 0) continue; // h1_norm column
        out += ",hs_norm_" + detail::fmt_double(traj.sobolev_orders[j]);
    }
    out += ",damping_integral\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += detail::fmt_double(traj.times[i]);
        for (double v : traj.invariant_values[i]) out += ',' + detail::fmt_double(v);
        for (std::size_t j = 0; j < traj.sobolev_norms[i].size(); ++j)
            out += ',' + detail::fmt_double(traj.sobolev_norms[i][j]);
        out += ',' + detail::fmt_double(traj.damping_ledger.empty() ? 0.0 : traj.damping_ledger[i]);
        out += '\n';
    }
    detail::atomic_write(path, out);
}

inline void write_control_csv(const std::filesystem::path& path, const ControlSignal& signal,
                              const std::vector<double>& times) {
    std::string out = "t,k,re,im\n";
    for (double t : times) {
        const SpectralField h = signal.coefficients(t);
        for (int k = -h.order(); k <= h.order(); ++k) {
            out += detail::fmt_double(t);
            out += ',' + std::to_string(k);
            out += ',' + detail::fmt_double(h(k).real());
            out += ',' + detail::fmt_double(h(k).imag());
            out += '\n';
        }
    }
    detail::atomic_write(path, out);
}

} // namespace kdvbbm
