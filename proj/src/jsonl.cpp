#include "docsync/jsonl.hpp"

#include "docsync/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace docsync {

using nlohmann::json;

void for_each_jsonl(const std::string& path,
                    const std::function<bool(std::size_t, const json&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = line.find_first_not_of(" \t") == std::string::npos;
        if (blank) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw DataError(path + ": line " + std::to_string(lineno) + ": not a JSON object");
        }
        if (!fn(lineno, obj)) return;
    }
}

std::string require_string(const json& obj, const char* field, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) {
        throw DataError("line " + std::to_string(line) + ": missing field " + field);
    }
    if (!it->is_string()) {
        throw DataError("line " + std::to_string(line) + ": field " + field +
                        " must be a string");
    }
    return it->get<std::string>();
}

struct AtomicWriter::Impl {
    std::string path;
    std::string tmp_path;
    std::ofstream out;
    bool committed = false;
};

AtomicWriter::AtomicWriter(std::string path) : impl_(new Impl) {
    impl_->path = std::move(path);
    impl_->tmp_path = impl_->path + ".tmp";
    impl_->out.open(impl_->tmp_path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) {
        std::string msg = impl_->tmp_path + ": cannot open for writing";
        delete impl_;
        throw DataError(msg);
    }
}

AtomicWriter::~AtomicWriter() {
    if (!impl_->committed) {
        impl_->out.close();
        std::error_code ec;
        std::filesystem::remove(impl_->tmp_path, ec);
    }
    delete impl_;
}

void AtomicWriter::write_line(const std::string& line) {
    impl_->out << line << '\n';
    if (!impl_->out) throw DataError(impl_->tmp_path + ": write failed");
}

void AtomicWriter::commit() {
    impl_->out.flush();
    if (!impl_->out) throw DataError(impl_->tmp_path + ": flush failed");
    impl_->out.close();
    std::error_code ec;
    std::filesystem::rename(impl_->tmp_path, impl_->path, ec);
    if (ec) throw DataError(impl_->path + ": rename failed: " + ec.message());
    impl_->committed = true;
}

} // namespace docsync
