#pragma once

#include <string>
#include <vector>

#include "nulltank/engine.hpp"

namespace nulltank {

/// Column names for a run with the given dimensions, in file order.
std::vector<std::string> csv_columns(int n, int m1, int m2);

/// Writes one row per control step with 17 significant digits, enough to
/// round-trip doubles exactly. The file is written to <path>.tmp first and
/// renamed into place so readers never observe a half-written file.
/// Throws NumericError on I/O failure.
void write_csv(const std::string& path, const std::vector<StepRecord>& records,
               int n, int m1, int m2);

/// Reads back a file produced by write_csv. Used by the compare command and
/// by round-trip tests. Throws NumericError on malformed input.
std::vector<StepRecord> read_csv(const std::string& path, int n, int m1,
                                 int m2);

/// Serializes the run summary (JSON text, stable key order).
std::string summary_json(const RunSummary& sum, const PassivityLedger& led,
                         const std::vector<std::string>& defaulted);

}  // namespace nulltank
