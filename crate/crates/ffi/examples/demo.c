/* Fits an AR(1) to a synthetic series and prints a 3-step forecast. */
#include <stdio.h>

#include "sarima.h"

int main(void) {
    double values[240];
    double x = 0.0;
    unsigned long long state = 12345;
    for (int i = 0; i < 240; i++) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        x = 0.6 * x + ((double)(state >> 11) / 9007199254740992.0 - 0.5);
        values[i] = x;
    }

    SarimaSeries *series = NULL;
    SarimaFit *fit = NULL;
    SarimaForecast *fc = NULL;
    SarimaOrder order = {1, 0, 0, 0, 0, 0, 12};
    SarimaFitSummary summary;
    double mean[3], lo95[3], hi95[3];

    if (sarima_series_new(2000, 1, values, 240, &series) != SARIMA_STATUS_OK ||
        sarima_fit(series, &order, &fit) != SARIMA_STATUS_OK ||
        sarima_fit_summary(fit, &summary) != SARIMA_STATUS_OK ||
        sarima_forecast(fit, series, 3, &fc) != SARIMA_STATUS_OK ||
        sarima_forecast_columns(fc, mean, NULL, NULL, NULL, lo95, hi95, 3) != SARIMA_STATUS_OK) {
        fprintf(stderr, "error: %s\n", sarima_last_error());
        return 1;
    }
    printf("aic %.4f converged %d\n", summary.aic, summary.converged);
    for (int h = 0; h < 3; h++) {
        printf("h=%d %.6f [%.6f, %.6f]\n", h + 1, mean[h], lo95[h], hi95[h]);
    }
    sarima_forecast_free(fc);
    sarima_fit_free(fit);
    sarima_series_free(series);
    return 0;
}
