//! Grading of handwritten answer sheets from phone photos.
//!
//! A photo is rectified from its borderline mask ([`rectify`]), answer
//! underlines are found in the rectified frame ([`linedet`]) and paired with
//! a template ([`template`]), the answer crops are read ([`recognize`]) and
//! scored by edit distance ([`grading`]). [`pipeline`] ties the stages
//! together over corpora produced by [`synthgen`], and [`segmetrics`] scores
//! segmentation masks pixel by pixel.

pub mod error;
pub mod font;
pub mod grading;
pub mod linedet;
mod fsutil;
pub mod pipeline;
pub mod raster;
pub mod segmetrics;
pub mod synthgen;
pub mod recognize;
pub mod rectify;
pub mod template;
