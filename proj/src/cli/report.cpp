#include "hypermass/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "hypermass/error.hpp"

namespace hypermass::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xF];
  return s;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_series_csv(const std::filesystem::path& path, const std::vector<SeriesRow>& rows) {
  auto out = open_out(path);
  out << "rho,m_x1,m_x2,m_x3,m_t,m_norm_sq,min_u,max_u,worst_pairing\n";
  for (const auto& r : rows) {
    out << format_real(r.rho) << ',' << format_real(r.m.x1) << ',' << format_real(r.m.x2) << ','
        << format_real(r.m.x3) << ',' << format_real(r.m.t) << ',' << format_real(r.m_norm_sq) << ','
        << format_real(r.min_u) << ',' << format_real(r.max_u) << ',' << format_real(r.worst_pairing) << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::string& param, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << param
      << ",exit_code,status,alpha,R1,R2,m_x1_0,m_x2_0,m_x3_0,m_t_0,m_norm_sq_0,worst_pairing_0,m_t_final,"
         "m_norm_sq_final\n";
  for (const auto& r : rows) {
    out << r.value << ',' << r.exit_code << ',' << r.status;
    if (r.has_flow) {
      out << ',' << format_real(r.alpha) << ',' << format_real(r.R1) << ',' << format_real(r.R2) << ','
          << format_real(r.m0.x1) << ',' << format_real(r.m0.x2) << ',' << format_real(r.m0.x3) << ','
          << format_real(r.m0.t) << ',' << format_real(r.m_norm_sq0) << ',' << format_real(r.worst_pairing0) << ','
          << format_real(r.m_final.t) << ',' << format_real(r.m_norm_sq_final);
    } else {
      out << ",,,,,,,,,,,";
    }
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& js) {
  auto out = open_out(path);
  out << js.dump(2) << '\n';
}

void write_field_dump(const std::filesystem::path& path, const SphereGrid& grid, double kappa, double rho,
                      const std::vector<FieldColumn>& columns) {
  for (const auto& c : columns) {
    if (c.values.size() != grid.size()) throw Error("field column " + c.name + " does not match the grid");
  }
  auto out = open_out(path);
  out << "# hypermass field dump\n";
  out << "# n_theta " << grid.n_theta() << "\n# n_psi " << grid.n_psi() << '\n';
  out << "# kappa " << format_real(kappa) << "\n# rho " << format_real(rho) << '\n';
  out << "# layout row-major (j,k), index = j*n_psi + k, theta_j = (j+1/2)pi/n_theta, psi_k = 2 pi k/n_psi\n";
  out << "# columns j k";
  for (const auto& c : columns) out << ' ' << c.name;
  out << '\n';
  for (int j = 0; j < grid.n_theta(); ++j) {
    for (int k = 0; k < grid.n_psi(); ++k) {
      const std::size_t i = grid.index(j, k);
      out << j << ' ' << k;
      for (const auto& c : columns) out << ' ' << format_real(c.values[i]);
      out << '\n';
    }
  }
}

}  // namespace hypermass::cli
