/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Minimal CSV emission and ingestion. Numbers use the shortest round-trip
// representation so identical inputs give byte-identical files.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "freqflux/errors.hpp"

namespace freqflux {

inline std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size()) {
            throw Error(ErrorKind::dimension_mismatch, "CSV row width differs from header");
        }
        append(cells);
        return *this;
    }

    CsvTable& row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_number(v));
        return row(cells);
    }

    std::string str() const {
        std::string out;
        bool first = true;
        for (const auto& h : header_) {
            if (!first) out += ',';
            out += h;
            first = false;
        }
        out += '\n';
        out += body_;
        return out;
    }

    std::size_t rows() const { return rows_; }

private:
    void append(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += '\n';
        ++rows_;
    }

    std::vector<std::string> header_;
    std::string body_;
    std::size_t rows_ = 0;
};

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw Error(ErrorKind::io_failure,
                        "cannot create directory '" + path.parent_path().string() + "': " + ec.message());
        }
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io_failure, "cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::io_failure, "write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::io_failure, "cannot rename onto '" + path.string() + "'");
    }
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    write_atomic(path, table.str());
}

/// Reads one numeric column of a CSV file with a header row. An empty name
/// selects the first column.
inline std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_argument, "cannot open input file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::invalid_argument, "'" + path.string() + "' is empty");
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            cells.push_back(cell);
        }
        return cells;
    };
    const auto header = split(line);
    std::size_t col = 0;
    if (!column.empty()) {
        col = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == column) col = i;
        }
        if (col == header.size()) {
            throw Error(ErrorKind::invalid_argument, "column '" + column + "' not found in '" + path.string() + "'");
        }
    }
    std::vector<double> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (col >= cells.size()) {
            throw Error(ErrorKind::invalid_argument, path.string() + ":" + std::to_string(line_no) + ": missing column");
        }
        double v = 0.0;
        const auto& c = cells[col];
        const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
        if (res.ec != std::errc{} || res.ptr != c.data() + c.size()) {
            throw Error(ErrorKind::invalid_argument,
                        path.string() + ":" + std::to_string(line_no) + ": '" + c + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace freqflux
