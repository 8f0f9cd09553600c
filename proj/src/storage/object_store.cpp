#include "signcrowd/storage/object_store.hpp"

#include <algorithm>
#include <iterator>

#include "signcrowd/error.hpp"

namespace fs = std::filesystem;

namespace signcrowd {

namespace {

constexpr std::string_view kVideoPrefix = "videos/";
constexpr std::string_view kKeypointPrefix = "keypoints/";

bool is_lower_hex(std::string_view s) {
    return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, path.filename().string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class LocalWriter final : public ObjectWriter {
public:
    LocalWriter(LocalObjectStore& store, std::string ext)
        : ObjectWriter(store.root() / ".incoming", std::move(ext), store.max_object_bytes()),
          store_(store) {}
    ~LocalWriter() override = default;

protected:
    void publish(const fs::path& spooled, const ObjectKey& key) override {
        const auto dest = store_.path_of(key);
        std::error_code ec;
        if (fs::exists(dest, ec)) return;
        fs::create_directories(dest.parent_path(), ec);
        fs::rename(spooled, dest, ec);
        if (ec) throw Error(ErrorCode::Backend, "cannot publish " + key.str() + ": " + ec.message());
    }

private:
    LocalObjectStore& store_;
};

}  // namespace

bool is_video_ext(std::string_view ext) { return ext == ".webm" || ext == ".mp4"; }

ObjectKey make_object_key(const Sha256Digest& digest, std::string_view ext) {
    if (is_video_ext(ext)) {
        return ObjectKey(std::string(kVideoPrefix) + to_hex(digest) + std::string(ext), ObjectKind::Video);
    }
    if (ext == ".jsonl") {
        return ObjectKey(std::string(kKeypointPrefix) + to_hex(digest) + ".jsonl", ObjectKind::Keypoints);
    }
    throw Error(ErrorCode::BadExt, "unsupported extension '" + std::string(ext) + "'");
}

ObjectKey key_for(std::string_view bytes, std::string_view ext) {
    return make_object_key(sha256(bytes), ext);
}

ObjectKey ObjectKey::parse(std::string_view text) {
    auto bad = [&] { return Error(ErrorCode::BadKey, "malformed object key '" + std::string(text) + "'"); };
    std::string_view rest;
    bool video = false;
    if (text.starts_with(kVideoPrefix)) {
        rest = text.substr(kVideoPrefix.size());
        video = true;
    } else if (text.starts_with(kKeypointPrefix)) {
        rest = text.substr(kKeypointPrefix.size());
    } else {
        throw bad();
    }
    if (rest.size() < 64 || !is_lower_hex(rest.substr(0, 64))) throw bad();
    const auto ext = rest.substr(64);
    if (video ? !is_video_ext(ext) : ext != ".jsonl") throw bad();
    return ObjectKey(std::string(text), video ? ObjectKind::Video : ObjectKind::Keypoints);
}

std::string_view ObjectKey::digest() const {
    const auto slash = text_.find('/');
    return std::string_view(text_).substr(slash + 1, 64);
}

std::string_view ObjectKey::ext() const { return std::string_view(text_).substr(text_.find('/') + 65); }

std::string_view ObjectKey::file_name() const {
    return std::string_view(text_).substr(text_.find('/') + 1);
}

ObjectWriter::ObjectWriter(fs::path spool_dir, std::string ext, std::size_t max_bytes)
    : ext_(std::move(ext)), max_bytes_(max_bytes) {
    if (!is_video_ext(ext_) && ext_ != ".jsonl") {
        throw Error(ErrorCode::BadExt, "unsupported extension '" + ext_ + "'");
    }
    std::error_code ec;
    fs::create_directories(spool_dir, ec);
    spool_path_ = spool_dir / ("upload-" + random_hex(12) + ".part");
    out_.open(spool_path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::Backend, "cannot open spool file in " + spool_dir.string());
}

ObjectWriter::~ObjectWriter() { discard(); }

void ObjectWriter::discard() noexcept {
    if (out_.is_open()) out_.close();
    std::error_code ec;
    fs::remove(spool_path_, ec);
    done_ = true;
}

void ObjectWriter::write(std::string_view chunk) {
    if (done_) throw Error(ErrorCode::Backend, "writer already finished");
    if (size_ + chunk.size() > max_bytes_) {
        discard();
        throw Error(ErrorCode::TooLarge, "object exceeds " + std::to_string(max_bytes_) + " bytes");
    }
    hash_.update(chunk);
    out_.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    if (!out_) {
        discard();
        throw Error(ErrorCode::Backend, "spool write failed");
    }
    size_ += chunk.size();
}

ObjectKey ObjectWriter::commit() {
    if (done_) throw Error(ErrorCode::Backend, "writer already finished");
    out_.close();
    if (!out_) {
        discard();
        throw Error(ErrorCode::Backend, "spool flush failed");
    }
    const auto key = make_object_key(hash_.finish(), ext_);
    try {
        publish(spool_path_, key);
    } catch (...) {
        discard();
        throw;
    }
    discard();
    return key;
}

void ObjectStore::copy_to_file(const ObjectKey& key, const fs::path& dest) {
    const auto bytes = get_object(key);
    std::error_code ec;
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path(), ec);
    std::ofstream out(dest, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + dest.string());
}

ObjectKey ObjectStore::put_object(std::string_view bytes, std::string_view ext) {
    auto writer = open_writer(ext);
    constexpr std::size_t kChunk = 1 << 20;
    for (std::size_t pos = 0; pos < bytes.size(); pos += kChunk) writer->write(bytes.substr(pos, kChunk));
    return writer->commit();
}

LocalObjectStore::LocalObjectStore(fs::path root, std::size_t max_bytes)
    : root_(std::move(root)), max_bytes_(max_bytes) {
    std::error_code ec;
    fs::create_directories(root_ / "videos", ec);
    fs::create_directories(root_ / "keypoints", ec);
    if (ec) throw Error(ErrorCode::Backend, "cannot create store root " + root_.string());
}

std::unique_ptr<ObjectWriter> LocalObjectStore::open_writer(std::string_view ext) {
    return std::make_unique<LocalWriter>(*this, std::string(ext));
}

std::string LocalObjectStore::get_object(const ObjectKey& key) {
    if (!exists(key)) throw Error(ErrorCode::NotFound, key.str());
    return read_file(path_of(key));
}

bool LocalObjectStore::exists(const ObjectKey& key) {
    std::error_code ec;
    return fs::is_regular_file(path_of(key), ec);
}

std::vector<ObjectKey> LocalObjectStore::list() {
    std::vector<ObjectKey> keys;
    for (const auto* dir : {"videos", "keypoints"}) {
        std::error_code ec;
        for (const auto& entry : fs::directory_iterator(root_ / dir, ec)) {
            try {
                keys.push_back(ObjectKey::parse(std::string(dir) + "/" + entry.path().filename().string()));
            } catch (const Error&) {
                // foreign file in the store root
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

void LocalObjectStore::copy_to_file(const ObjectKey& key, const fs::path& dest) {
    if (!exists(key)) throw Error(ErrorCode::NotFound, key.str());
    std::error_code ec;
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path(), ec);
    fs::copy_file(path_of(key), dest, fs::copy_options::overwrite_existing, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot copy " + key.str() + ": " + ec.message());
}

}  // namespace signcrowd
