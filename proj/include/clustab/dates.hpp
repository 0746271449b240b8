#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace clustab {

// Parses YYYY-MM-DD with full calendar validation (leap years included).
// Returns false on malformed input instead of throwing.
bool parse_iso_date(const std::string& s, int& year, int& month, int& day);

bool is_valid_iso_date(const std::string& s);

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
long days_from_civil(int year, int month, int day);

std::string iso_from_days(long days);

// 0 = Monday .. 6 = Sunday.
int weekday_from_days(long days);

// `count` consecutive weekdays starting at `start` (itself included when it
// is a weekday). Used to stamp synthetic panels with plausible trading dates.
std::vector<std::string> business_days(const std::string& start, std::size_t count);

}  // namespace clustab
