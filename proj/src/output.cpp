#include "sds/output.hpp"

#include "sds/errors.hpp"

#include <fstream>
#include <sstream>

namespace sds {

void write_csv(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw config_error("cannot open for writing: " + path);
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << fmt17(row[c]);
        out << "\n";
    }
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (first) {
            table.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw config_error("malformed number '" + c + "' in " + path);
            }
        }
        if (row.size() != table.header.size())
            throw config_error("ragged row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_summary(const std::string& path, const Summary& summary)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw config_error("cannot open for writing: " + path);
    for (const auto& [key, value] : summary)
        out << key << " = " << value << "\n";
}

std::map<std::string, std::string> read_summary(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos)
            continue;
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw config_error("cannot open for writing: " + path);
    out << text;
}

} // namespace sds
