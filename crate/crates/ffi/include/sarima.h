#ifndef SARIMA_H
#define SARIMA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SarimaStatus {
  SARIMA_STATUS_OK = 0,
  SARIMA_STATUS_NULL_POINTER = 1,
  /**
   * Bad arguments: orders, lengths, horizons, configuration.
   */
  SARIMA_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Problems with the data: gaps, parse errors, too few observations.
   */
  SARIMA_STATUS_DATA_ERROR = 3,
  /**
   * Non-convergence, singular systems, non-finite likelihoods.
   */
  SARIMA_STATUS_NUMERICAL_ERROR = 4,
  /**
   * A caller buffer is shorter than the result.
   */
  SARIMA_STATUS_BUFFER_TOO_SMALL = 5,
  SARIMA_STATUS_PANIC = 6,
} SarimaStatus;

/**
 * Opaque fitted model.
 */
typedef struct SarimaFit SarimaFit;

/**
 * Opaque interval forecast.
 */
typedef struct SarimaForecast SarimaForecast;

/**
 * Opaque monthly series.
 */
typedef struct SarimaSeries SarimaSeries;

/**
 * `(p,d,q)(P,D,Q)_period`.
 */
typedef struct SarimaOrder {
  uint32_t p;
  uint32_t d;
  uint32_t q;
  uint32_t sp;
  uint32_t sd;
  uint32_t sq;
  uint32_t period;
} SarimaOrder;

typedef struct SarimaFitSummary {
  double loglik;
  double aic;
  double aicc;
  double bic;
  double sigma2;
  size_t n_effective;
  size_t iterations;
  bool converged;
  /**
   * Number of ARMA coefficients (`p + q + P + Q`).
   */
  size_t coef_count;
} SarimaFitSummary;

typedef struct SarimaAccuracy {
  double mse;
  double rmse;
  /**
   * Percent.
   */
  double mape;
} SarimaAccuracy;

typedef struct SarimaTest {
  double statistic;
  double p_value;
} SarimaTest;

/**
 * Residual tests with default settings (α 0.05, 24 lags).
 */
typedef struct SarimaResidualReport {
  size_t nobs;
  double mean;
  struct SarimaTest zero_mean;
  struct SarimaTest adf;
  struct SarimaTest box_pierce;
  struct SarimaTest ljung_box;
  struct SarimaTest ks_normality;
  bool zero_mean_ok;
  bool stationary_ok;
  bool no_autocorrelation_ok;
  bool normality_ok;
} SarimaResidualReport;

typedef struct SarimaDifference {
  double nominal;
  double percent;
} SarimaDifference;

/**
 * Mean differences of observed values from the projection and its bands.
 */
typedef struct SarimaImpact {
  size_t months;
  struct SarimaDifference point;
  struct SarimaDifference lo80;
  struct SarimaDifference hi80;
  struct SarimaDifference lo95;
  struct SarimaDifference hi95;
} SarimaImpact;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sarima_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sarima_version(void);

/**
 * Copies `len` values starting at `start_year`-`start_month` into a new series.
 */
enum SarimaStatus sarima_series_new(int32_t start_year,
                                    uint32_t start_month,
                                    const double *values,
                                    size_t len,
                                    struct SarimaSeries **out);

/**
 * Loads a `date,value` CSV (first two columns, header detected).
 */
enum SarimaStatus sarima_series_load_csv(const char *path, struct SarimaSeries **out);

size_t sarima_series_len(const struct SarimaSeries *series);

enum SarimaStatus sarima_series_start(const struct SarimaSeries *series,
                                      int32_t *year,
                                      uint32_t *month);

/**
 * Copies the values into `buf`, which must hold `sarima_series_len` entries.
 */
enum SarimaStatus sarima_series_values(const struct SarimaSeries *series, double *buf, size_t len);

void sarima_series_free(struct SarimaSeries *series);

/**
 * Maximum-likelihood fit of `order` to the whole of `training`.
 */
enum SarimaStatus sarima_fit(const struct SarimaSeries *training,
                             const struct SarimaOrder *order,
                             struct SarimaFit **out);

enum SarimaStatus sarima_fit_summary(const struct SarimaFit *fit, struct SarimaFitSummary *out);

/**
 * Coefficients in `ar, ma, sar, sma` order and their standard errors (NaN
 * when unavailable). `std_errors` may be NULL.
 */
enum SarimaStatus sarima_fit_coefficients(const struct SarimaFit *fit,
                                          double *coefs,
                                          double *std_errors,
                                          size_t len);

void sarima_fit_free(struct SarimaFit *fit);

/**
 * `h`-step forecast from the end of `training`, which must be the series the
 * model was fitted on.
 */
enum SarimaStatus sarima_forecast(const struct SarimaFit *fit,
                                  const struct SarimaSeries *training,
                                  size_t h,
                                  struct SarimaForecast **out);

size_t sarima_forecast_len(const struct SarimaForecast *fc);

enum SarimaStatus sarima_forecast_start(const struct SarimaForecast *fc,
                                        int32_t *year,
                                        uint32_t *month);

/**
 * Copies forecast columns into caller buffers of `len` entries; any column
 * pointer may be NULL to skip it.
 */
enum SarimaStatus sarima_forecast_columns(const struct SarimaForecast *fc,
                                          double *mean,
                                          double *se,
                                          double *lo80,
                                          double *hi80,
                                          double *lo95,
                                          double *hi95,
                                          size_t len);

void sarima_forecast_free(struct SarimaForecast *fc);

enum SarimaStatus sarima_accuracy(const double *actual,
                                  const double *predicted,
                                  size_t len,
                                  struct SarimaAccuracy *out);

enum SarimaStatus sarima_residual_report(const struct SarimaFit *fit,
                                         const struct SarimaSeries *training,
                                         struct SarimaResidualReport *out);

/**
 * `observed` must cover exactly the forecast months.
 */
enum SarimaStatus sarima_impact(const struct SarimaSeries *observed,
                                const struct SarimaForecast *projection,
                                struct SarimaImpact *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SARIMA_H */
