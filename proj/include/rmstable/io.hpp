#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmstable/ensembles.hpp"

namespace rms {

// %.17g: enough digits for an exact double round trip.
std::string fmt17(double x);

// First line "# <json header>", then CSV with one column per real degree of
// freedom: re_a_b for a <= b and im_a_b for a < b.
void write_batch(const std::filesystem::path& path, const SampleBatch& batch, const nlohmann::json& extra);
SampleBatch read_batch(const std::filesystem::path& path, nlohmann::json* header = nullptr);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<std::string>& cells);
    std::string str() const;
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace rms
