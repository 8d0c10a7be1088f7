/*
 * Copyright 2026 The Fairbound Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRBOUND_LOGGING_H_
#define FAIRBOUND_LOGGING_H_

#include <spdlog/spdlog.h>

namespace fairbound {

// Configures the process-wide stderr logger from FAIRBOUND_LOG
// (quiet|info|debug, default info). Safe to call more than once.
void InitLoggingFromEnv();

}  // namespace fairbound

#endif  // FAIRBOUND_LOGGING_H_
