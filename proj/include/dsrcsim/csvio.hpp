#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace dsrcsim {

// Writes to "<path>.tmp" and renames on commit, so consumers never see a
// partial file. An uncommitted writer cleans its temporary up on
// destruction.
class AtomicFileWriter {
public:
    explicit AtomicFileWriter(std::filesystem::path path);
    AtomicFileWriter(const AtomicFileWriter&) = delete;
    AtomicFileWriter& operator=(const AtomicFileWriter&) = delete;
    ~AtomicFileWriter();

    std::ostream& stream() { return out_; }
    void commit();  // throws IoError on write or rename failure

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

std::string format_double(double value);  // shortest round-trippable-ish, %.10g

}  // namespace dsrcsim
