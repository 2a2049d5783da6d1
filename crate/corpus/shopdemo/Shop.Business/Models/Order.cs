using System;
using System.Collections.Generic;

namespace Shop.Business.Models
{
    public partial class Order
    {
        private string status = "Open";

        public Order(int customerId)
        {
            CustomerId = customerId;
            Lines = new List<OrderLine>();
        }

        public int Id { get; set; }
        public int CustomerId { get; set; }
        public List<OrderLine> Lines { get; private set; }

        public void AddLines(List<OrderLine> lines)
        {
            foreach (OrderLine line in lines)
            {
                Lines.Add(line);
            }
        }

        public void Close()
        {
            status = "Closed";
        }
    }
}
