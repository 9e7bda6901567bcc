from .datatypes import (LossWeights, TrainConfig, FusionSpec, IndexSource, Strategy, ModuleCount, LossBreakdown,
                        SegBatch, DepthBatch)
from .losses import (l2_loss, berhu_loss, cross_entropy_loss, lsgan_d_loss, lsgan_g_loss, latent_consistency_loss,
                     combined_loss, generator_pass, discriminator_loss)
from .graph import (TranslationGraph, Translator, FusionTranslator, register_modality, register_training_pair, compose,
                    compose_cascade, compose_fusion, fuse_latents, count_trained_modules, build_mixmatch_graph,
                    save_graph, load_graph)
from .report import TrainingReport
from .trainer import Trainer, train
