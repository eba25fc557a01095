#ifndef HSLAB_SPECIAL_HPP
#define HSLAB_SPECIAL_HPP

namespace hslab {

// regularized incomplete beta I_x(a,b), continued-fraction evaluation
double betainc(double a, double b, double x);
double log_beta(double a, double b);

// Kolmogorov distribution: P(sup|B_bridge| > lambda), used for KS p-values
double kolmogorov_tail(double lambda);

// one-sample KS p-value given statistic d and sample size n
double ks_pvalue(double d, int n);
// two-sample KS p-value
double ks2_pvalue(double d, int n, int m);

}  // namespace hslab

#endif
