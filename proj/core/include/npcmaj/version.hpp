#pragma once

namespace npcmaj {

const char* library_version() noexcept;

}  // namespace npcmaj
