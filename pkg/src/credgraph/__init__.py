"""credgraph: inductive social-context graph learning for news credibility.

A heterogeneous graph of articles, sources, and users is encoded with a
sampled-neighborhood structural encoder and a Bi-LSTM attention aggregator
over engagement sequences, trained jointly on proximity, stance, and
credibility objectives.
"""

from .config import RunConfig
from .evaluate import (RocResult, attention_profile, auc, homogeneity,
                       linear_probe, optics_cluster)
from .features import (TfIdfModel, WordEmbeddingTable, build_feature_table,
                       clean_post_text, engagement_meta, entity_features,
                       fit_tfidf, load_stopwords, report_stance_rule)
from .graph import (Edge, EngagementSeq, GraphFormatError, NodeId, NodeRecord,
                    SocialGraph, Stance, load_graph, save_graph)
from .objectives import (CredibilityModel, TrainConfig, TrainResult,
                         fake_news_loss, gradients, load_checkpoint,
                         predict_article, proximity_loss, save_checkpoint,
                         stance_loss, total_loss, train)
from .synth import SynthConfig, synth_generate

__version__ = "0.1.0"
