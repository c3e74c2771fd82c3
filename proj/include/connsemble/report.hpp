#pragma once

#include "connsemble/evaluation.hpp"

#include <filesystem>
#include <string>

namespace connsemble {

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

void export_report(const EvaluationReport& report, const std::filesystem::path& path, bool overwrite = false);
EvaluationReport import_report(const std::filesystem::path& path);

/// Long format: strategy,metric,index,value.
void export_fold_values(const EvaluationReport& report, const std::filesystem::path& path, bool overwrite = false);

std::string comparison_table(const std::vector<ReportComparison>& rows);

}  // namespace connsemble
