#pragma once

#include <string>
#include <vector>

namespace refertriage {

struct CaptureScenario {
    double baseline_rate = 0.1127;  // current procedure rate b
    double model_rate = 0.601;      // model-captured procedure rate m
    std::vector<double> capture_levels = {0.0, 0.05, 0.10, 0.20, 0.40, 0.80};
    long long n_referrals = 5000;
    double price_per_procedure = 5000.0;

    void validate() const;
};

struct CaptureRow {
    double capture = 0.0;
    double effective_rate = 0.0;   // full precision; display rounding at serialization
    double pct_increase = 0.0;     // (e - b) / b * 100
    long long procedures = 0;      // round-half-away-from-zero(N * e)
    double revenue_increase = 0.0; // (procedures - round(N * b)) * price
};

// Linear mixing of the baseline and model-captured rates:
// e = (1 - c) * b + c * m.
double effective_rate(double baseline, double model, double capture);

std::vector<CaptureRow> simulate_capture(const CaptureScenario& scenario);

// Two-proportion test of round(N*b)/N against round(N*m)/N.
double compare_rates(const CaptureScenario& scenario);

// capture_pct,effective_rate_pct,pct_increase,procedures,revenue_increase_musd
void write_capture_csv(const std::string& path, const std::vector<CaptureRow>& rows);

CaptureScenario scenario_from_json_file(const std::string& path);

} // namespace refertriage
