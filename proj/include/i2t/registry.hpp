#pragma once

#include <memory>
#include <string>

#include "i2t/encoders.hpp"

namespace i2t {

/// Encoder ids are configuration data. Built-in toy ids look like
///   toy-image:seed=7,dim=32,patch=4,size=32x32
///   toy-text:seed=7,dim=32
///   toy-caption:seed=7,dim=32,patch=4,size=32x32,words=3
/// Unknown ids raise ModelLoad (pretrained checkpoints are loaded through the
/// Python adapters, not this registry).
std::unique_ptr<ImageEncoderAdapter> make_image_encoder(const std::string& encoder_id);
std::unique_ptr<TextEncoderAdapter> make_text_encoder(const std::string& encoder_id);
std::unique_ptr<CaptionPipelineAdapter> make_captioner(const std::string& pipeline_id);

}  // namespace i2t
