using System;
using System.Linq;

namespace Shop.Business.Models
{
    public partial class Order
    {
        public decimal Total
        {
            get { return Lines.Sum(l => l.Price * l.Quantity); }
        }

        public bool IsEmpty => Lines.Count == 0;
    }
}
