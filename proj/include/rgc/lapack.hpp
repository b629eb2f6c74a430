#pragma once

#include <complex>
#include <vector>

#include "rgc/error.hpp"

extern "C" {
void zhseqr_(const char* job, const char* compz, const int* n, const int* ilo, const int* ihi,
             std::complex<double>* h, const int* ldh, std::complex<double>* w,
             std::complex<double>* z, const int* ldz, std::complex<double>* work,
             const int* lwork, int* info);
void zgebal_(const char* job, const int* n, std::complex<double>* a, const int* lda, int* ilo,
             int* ihi, double* scale, int* info);
}

namespace rgc::lapack {

// Eigenvalues of an upper Hessenberg matrix stored column-major (m x m).
// The matrix is overwritten. With balance set, diagonal scaling is applied
// first; scaling keeps the Hessenberg pattern.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(
    std::vector<std::complex<double>>& h, int m, bool balance = false) {
  require(m >= 1 && h.size() == static_cast<std::size_t>(m) * m, errc::sizing,
          "Hessenberg matrix has wrong size");
  int ilo = 1, ihi = m, info = 0;
  if (balance) {
    std::vector<double> scale(m);
    const char job = 'S';
    zgebal_(&job, &m, h.data(), &m, &ilo, &ihi, scale.data(), &info);
    require(info == 0, errc::invalid_argument, "zgebal failed");
  }
  std::vector<std::complex<double>> w(m);
  std::complex<double> dummy;
  const char job = 'E', compz = 'N';
  int ldz = 1, lwork = -1;
  std::complex<double> query;
  zhseqr_(&job, &compz, &m, &ilo, &ihi, h.data(), &m, w.data(), &dummy, &ldz, &query, &lwork,
          &info);
  lwork = std::max(1, static_cast<int>(query.real()));
  std::vector<std::complex<double>> work(lwork);
  zhseqr_(&job, &compz, &m, &ilo, &ihi, h.data(), &m, w.data(), &dummy, &ldz, work.data(), &lwork,
          &info);
  require(info == 0, errc::degenerate, "zhseqr did not converge");
  return w;
}

}  // namespace rgc::lapack
