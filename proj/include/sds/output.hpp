#ifndef SDS_OUTPUT_HPP
#define SDS_OUTPUT_HPP

#include "sds/config.hpp"

#include <map>
#include <string>
#include <vector>

namespace sds {

// Comma-separated dump with a one-line header; reals at 17 significant
// digits, fixed row order, so identical inputs give bit-identical files.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Flat key = value summary (one entry per line, reals at 17 digits).
using Summary = std::vector<std::pair<std::string, std::string>>;

void write_summary(const std::string& path, const Summary& summary);
std::map<std::string, std::string> read_summary(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

} // namespace sds

#endif
