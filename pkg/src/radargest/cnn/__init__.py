from .layers import (
    conv_backward,
    conv_forward,
    fc_backward,
    fc_forward,
    maxpool_backward,
    maxpool_overlap,
    relu,
    relu_backward,
    softmax,
    softmax_cross_entropy,
)
from .network import (
    Conv,
    Flatten,
    FullyConnected,
    MaxPoolOverlap,
    ModelState,
    NetworkSpec,
    PROFILES,
    ReLU,
    Softmax,
    backward,
    desk_profile,
    evaluate,
    forward,
    init,
    paper_profile,
    predict,
)
from .optim import EpochRecord, PlateauSchedule, TrainConfig, TrainResult, sgd_step, train
from .gradcheck import numeric_grad, relative_error
