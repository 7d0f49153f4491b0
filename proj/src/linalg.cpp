#include "hamwave/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <sstream>

namespace hamwave {

OperatorMatrix make_operator(std::string name, std::string state, Mat form, Mat l2, Mat x, double tol) {
  double scale = form.cwiseAbs().maxCoeff();
  double defect = (form - form.transpose()).cwiseAbs().maxCoeff();
  double rel = scale > 0 ? defect / scale : 0.0;
  if (rel > tol) {
    std::ostringstream os;
    os << name << ": relative asymmetry " << rel << " exceeds " << tol;
    throw Error(ErrorKind::SymmetryDefect, os.str());
  }
  OperatorMatrix m;
  m.name = std::move(name);
  m.state = std::move(state);
  m.form = 0.5 * (form + form.transpose());
  m.l2 = std::move(l2);
  m.x = std::move(x);
  m.symmetry_defect = rel;
  return m;
}

EigenPairs generalized_eigen(const Mat& form, const Mat& metric) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(form, metric, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::SpectralConfigViolation, "eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double constrained_rayleigh_min(const OperatorMatrix& m, const std::vector<Vec>& constraints) {
  const Eigen::Index n = m.dim();
  if (constraints.empty()) return generalized_eigen(m.form, m.x).values(0);
  const Eigen::Index r = static_cast<Eigen::Index>(constraints.size());
  Mat C(n, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    Vec xc = m.x * constraints[i];
    double nrm = xc.norm();
    if (nrm == 0.0) throw Error(ErrorKind::DegenerateConstraints, "zero constraint vector");
    C.col(i) = xc / nrm;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(C);
  qr.setThreshold(1e-10);
  if (qr.rank() < r) throw Error(ErrorKind::DegenerateConstraints, "constraints are linearly dependent");
  Mat Q = qr.householderQ();
  Mat Z = Q.rightCols(n - r);
  Mat A = Z.transpose() * m.form * Z;
  Mat G = Z.transpose() * m.x * Z;
  A = 0.5 * (A + A.transpose());
  G = 0.5 * (G + G.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, G, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::DegenerateConstraints, "restricted eigensolve failed");
  return es.eigenvalues()(0);
}

SpectralReport analyze_spectrum(const OperatorMatrix& m, const Vec& generator, SpectralMetric metric, int keep,
                                double zero_tol, bool throw_on_violation) {
  const Mat& G = metric == SpectralMetric::L2 ? m.l2 : m.x;
  EigenPairs ep = generalized_eigen(m.form, G);
  const Eigen::Index n = ep.values.size();

  SpectralReport rep;
  rep.zero_tol = zero_tol;
  Eigen::Index izero = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ep.values(i) < -zero_tol) ++rep.negative_count;
    if (std::abs(ep.values(i)) <= zero_tol) ++rep.near_zero_count;
    if (std::abs(ep.values(i)) < std::abs(ep.values(izero))) izero = i;
  }
  rep.zero_eigenvalue = ep.values(izero);
  Vec z = ep.vectors.col(izero);
  double gz = std::sqrt(std::abs(generator.dot(G * generator)));
  double zz = std::sqrt(std::abs(z.dot(G * z)));
  rep.zero_alignment = (gz > 0 && zz > 0) ? std::abs(z.dot(G * generator)) / (gz * zz) : 0.0;
  rep.gap = izero + 1 < n ? ep.values(izero + 1) : 0.0;
  if (ep.values(0) < 0) {
    rep.mu_sq = -ep.values(0);
    Vec chi = ep.vectors.col(0);
    rep.chi = chi / std::sqrt(chi.dot(m.x * chi));
  }
  const Eigen::Index k = std::min<Eigen::Index>(keep, n);
  rep.eigenvalues = ep.values.head(k);
  rep.eigenvectors.resize(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    Vec v = ep.vectors.col(i);
    rep.eigenvectors.col(i) = v / std::sqrt(v.dot(m.x * v));
  }
  rep.configuration_ok = rep.negative_count == 1 && rep.near_zero_count == 1 && rep.gap > zero_tol;
  if (!rep.configuration_ok && throw_on_violation) {
    std::ostringstream os;
    os << m.name << ": negative=" << rep.negative_count << " near_zero=" << rep.near_zero_count
       << " gap=" << rep.gap;
    throw Error(ErrorKind::SpectralConfigViolation, os.str());
  }
  return rep;
}

}  // namespace hamwave
