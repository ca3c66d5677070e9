#include "refertriage/econ.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "refertriage/errors.hpp"
#include "refertriage/stats.hpp"

namespace refertriage {

void CaptureScenario::validate() const {
    if (!(baseline_rate > 0.0 && baseline_rate < 1.0))
        throw InvalidArgument("scenario: baseline_rate must lie in (0, 1)");
    if (!(model_rate > 0.0 && model_rate < 1.0))
        throw InvalidArgument("scenario: model_rate must lie in (0, 1)");
    for (double c : capture_levels)
        if (!(c >= 0.0 && c <= 1.0))
            throw InvalidArgument("scenario: capture levels must lie in [0, 1]");
    if (n_referrals < 1) throw InvalidArgument("scenario: n_referrals must be >= 1");
    if (price_per_procedure < 0.0) throw InvalidArgument("scenario: price must be >= 0");
}

double effective_rate(double baseline, double model, double capture) {
    if (!(baseline > 0.0 && baseline < 1.0) || !(model > 0.0 && model < 1.0) ||
        !(capture >= 0.0 && capture <= 1.0))
        throw InvalidArgument("effective_rate: inputs out of range");
    return (1.0 - capture) * baseline + capture * model;
}

std::vector<CaptureRow> simulate_capture(const CaptureScenario& scenario) {
    scenario.validate();
    const double n = static_cast<double>(scenario.n_referrals);
    const long long baseline_procedures = std::llround(n * scenario.baseline_rate);

    std::vector<CaptureRow> rows;
    rows.reserve(scenario.capture_levels.size());
    for (double c : scenario.capture_levels) {
        CaptureRow row;
        row.capture = c;
        row.effective_rate = effective_rate(scenario.baseline_rate, scenario.model_rate, c);
        row.pct_increase =
            (row.effective_rate - scenario.baseline_rate) / scenario.baseline_rate * 100.0;
        row.procedures = std::llround(n * row.effective_rate);
        row.revenue_increase =
            static_cast<double>(row.procedures - baseline_procedures) *
            scenario.price_per_procedure;
        rows.push_back(row);
    }
    return rows;
}

double compare_rates(const CaptureScenario& scenario) {
    scenario.validate();
    const double n = static_cast<double>(scenario.n_referrals);
    const size_t trials = static_cast<size_t>(scenario.n_referrals);
    return two_proportion_test(static_cast<size_t>(std::llround(n * scenario.baseline_rate)),
                               trials,
                               static_cast<size_t>(std::llround(n * scenario.model_rate)),
                               trials);
}

void write_capture_csv(const std::string& path, const std::vector<CaptureRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "capture_pct,effective_rate_pct,pct_increase,procedures,revenue_increase_musd\n";
    for (const CaptureRow& row : rows) {
        std::ostringstream line;
        line << std::fixed << std::setprecision(2) << row.capture * 100.0 << ','
             << row.effective_rate * 100.0 << ',' << row.pct_increase << ',' << row.procedures
             << ',' << row.revenue_increase / 1e6;
        out << line.str() << "\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

CaptureScenario scenario_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("scenario file is not valid JSON: " + path);

    CaptureScenario s;
    s.baseline_rate = j.value("baseline_rate", s.baseline_rate);
    s.model_rate = j.value("model_rate", s.model_rate);
    if (j.contains("capture_levels"))
        s.capture_levels = j.at("capture_levels").get<std::vector<double>>();
    s.n_referrals = j.value("n_referrals", s.n_referrals);
    s.price_per_procedure = j.value("price_per_procedure", s.price_per_procedure);
    s.validate();
    return s;
}

} // namespace refertriage
