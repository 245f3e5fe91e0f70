#pragma once

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>

namespace docsync {

// Calls `fn(line_number, object)` for every non-blank line of a JSONL file.
// Line numbers are 1-based. Throws DataError on unreadable files or lines
// that are not JSON objects; the message starts with "line N:" after the
// path prefix. `fn` returning false stops iteration early.
void for_each_jsonl(const std::string& path,
                    const std::function<bool(std::size_t, const nlohmann::json&)>& fn);

// Writes to a temporary sibling file and renames it into place on commit().
// A writer that is destroyed without commit() removes the temporary, so a
// failed command never leaves a partial output behind.
class AtomicWriter {
public:
    explicit AtomicWriter(std::string path);
    ~AtomicWriter();

    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;

    void write_line(const std::string& line);
    void commit();

private:
    struct Impl;
    Impl* impl_;
};

// JSON field accessors that fail with "line N: ..." messages.
std::string require_string(const nlohmann::json& obj, const char* field, std::size_t line);

} // namespace docsync
